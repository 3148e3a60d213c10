//! Beam search, UNK copying and the token-level prediction pipeline.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::io::Write;
use std::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};

use crate::cache::{CacheKey, LemmaCache};
use crate::codec::{encode_example, ids_of, Special, Symbol, Vocabulary};
use crate::conllu::{Token, Treebank};
use crate::error::{Error, Result};
use crate::model::{DecoderState, EncoderOutput, Seq2SeqModel};
use crate::nn::Scalar;

/// Glyph emitted when an UNK cannot be copied from the input.
pub const REPLACEMENT: char = '\u{FFFD}';

/// One step of a decoder for one hypothesis.
#[derive(Clone, Debug)]
pub struct Step<S> {
    /// Log-probabilities over the output vocabulary.
    pub log_probs: Vec<f64>,
    /// Attention over input positions.
    pub attention: Vec<f64>,
    pub state: S,
}

/// Anything that can be decoded step by step.
pub trait StepModel {
    type State: Clone;

    fn bos(&self) -> u32;
    fn eos(&self) -> u32;
    fn initial_state(&self) -> Self::State;
    /// Advance each `(state, previous id)` pair by one step.
    fn step(&self, states: &[&Self::State], prev: &[u32]) -> Result<Vec<Step<Self::State>>>;
}

#[derive(Clone, Debug)]
pub struct Hypothesis<S> {
    /// Emitted ids, without the final EOS.
    pub output: Vec<u32>,
    /// Sum of per-step log-probabilities, including the EOS step if any.
    pub log_prob: f64,
    /// One attention vector per entry of `output`.
    pub attention: Vec<Vec<f64>>,
    pub state: S,
    /// False when decoding was cut off at the length limit.
    pub ended: bool,
}

fn rank<S>(a: &Hypothesis<S>, b: &Hypothesis<S>) -> Ordering {
    b.log_prob
        .total_cmp(&a.log_prob)
        .then_with(|| a.output.cmp(&b.output))
}

/// Beam search without length normalization.
///
/// Each step expands every live hypothesis over the whole vocabulary except
/// BOS and keeps the `beam_size` best candidates; candidates ending in EOS
/// are finished. Decoding stops once `beam_size` hypotheses have finished
/// and no live one can still beat them, when nothing is live, or after
/// `max_len` steps, in which case the live hypotheses are finished as they
/// stand. Results are sorted by score, then by output ids.
pub fn beam_search<M: StepModel>(model: &M, beam_size: usize, max_len: usize) -> Result<Vec<Hypothesis<M::State>>> {
    if beam_size == 0 || max_len == 0 {
        return Err(Error::invalid("beam size and maximum length must be positive"));
    }
    let (bos, eos) = (model.bos(), model.eos());
    let mut live = vec![Hypothesis {
        output: Vec::new(),
        log_prob: 0.0,
        attention: Vec::new(),
        state: model.initial_state(),
        ended: false,
    }];
    let mut finished: Vec<Hypothesis<M::State>> = Vec::new();

    for _ in 0..max_len {
        if live.is_empty() || settled(&finished, &live, beam_size) {
            break;
        }
        let prev: Vec<u32> = live.iter().map(|h| h.output.last().copied().unwrap_or(bos)).collect();
        let states: Vec<&M::State> = live.iter().map(|h| &h.state).collect();
        let steps = model.step(&states, &prev)?;

        let mut candidates: Vec<(f64, usize, u32)> = Vec::new();
        for (parent, step) in steps.iter().enumerate() {
            for (id, lp) in step.log_probs.iter().enumerate() {
                let id = id as u32;
                if id != bos {
                    candidates.push((live[parent].log_prob + lp, parent, id));
                }
            }
        }
        // Parents share one output length, so (parent output, id) orders the
        // extended sequences lexicographically.
        candidates.sort_by(|a, b| {
            b.0.total_cmp(&a.0)
                .then_with(|| live[a.1].output.cmp(&live[b.1].output))
                .then_with(|| a.2.cmp(&b.2))
        });
        candidates.truncate(beam_size);

        let mut next = Vec::with_capacity(candidates.len());
        for (score, parent, id) in candidates {
            let p = &live[parent];
            let step = &steps[parent];
            if id == eos {
                finished.push(Hypothesis {
                    output: p.output.clone(),
                    log_prob: score,
                    attention: p.attention.clone(),
                    state: step.state.clone(),
                    ended: true,
                });
            } else {
                let mut output = p.output.clone();
                output.push(id);
                let mut attention = p.attention.clone();
                attention.push(step.attention.clone());
                next.push(Hypothesis {
                    output,
                    log_prob: score,
                    attention,
                    state: step.state.clone(),
                    ended: false,
                });
            }
        }
        live = next;
    }
    if !settled(&finished, &live, beam_size) {
        finished.append(&mut live);
    }
    finished.sort_by(rank);
    Ok(finished)
}

/// True once `beam_size` hypotheses have finished and no live hypothesis
/// can still overtake the worst of the best `beam_size`, given that scores
/// only decrease.
fn settled<S>(finished: &[Hypothesis<S>], live: &[Hypothesis<S>], beam_size: usize) -> bool {
    if finished.len() < beam_size {
        return false;
    }
    let mut scores: Vec<f64> = finished.iter().map(|h| h.log_prob).collect();
    scores.sort_by(|a, b| b.total_cmp(a));
    let kth = scores[beam_size - 1];
    live.iter().all(|h| h.log_prob <= kth)
}

/// Step-wise argmax decoding; ties go to the smaller id.
pub fn greedy_decode<M: StepModel>(model: &M, max_len: usize) -> Result<Hypothesis<M::State>> {
    let (bos, eos) = (model.bos(), model.eos());
    let mut h = Hypothesis {
        output: Vec::new(),
        log_prob: 0.0,
        attention: Vec::new(),
        state: model.initial_state(),
        ended: false,
    };
    for _ in 0..max_len {
        let prev = h.output.last().copied().unwrap_or(bos);
        let step = model.step(&[&h.state], &[prev])?.remove(0);
        let (id, lp) = step
            .log_probs
            .iter()
            .enumerate()
            .filter(|&(i, _)| i as u32 != bos)
            .fold(None, |best: Option<(usize, f64)>, (i, &lp)| match best {
                Some((_, b)) if b >= lp => best,
                _ => Some((i, lp)),
            })
            .ok_or_else(|| Error::invalid("empty output vocabulary"))?;
        h.log_prob += lp;
        h.state = step.state;
        if id as u32 == eos {
            h.ended = true;
            break;
        }
        h.output.push(id as u32);
        h.attention.push(step.attention);
    }
    Ok(h)
}

/// A neural model bound to one encoded input.
pub struct EncodedSource<'m, T: Scalar> {
    model: &'m Seq2SeqModel<T>,
    enc: EncoderOutput<T>,
}

impl<'m, T: Scalar> EncodedSource<'m, T> {
    pub fn new(model: &'m Seq2SeqModel<T>, input_ids: &[u32]) -> Result<Self> {
        Ok(EncodedSource {
            model,
            enc: model.encode(input_ids)?,
        })
    }
}

impl<T: Scalar> StepModel for EncodedSource<'_, T> {
    type State = DecoderState<T>;

    fn bos(&self) -> u32 {
        Vocabulary::BOS
    }

    fn eos(&self) -> u32 {
        Vocabulary::EOS
    }

    fn initial_state(&self) -> Self::State {
        self.enc.initial_state.clone()
    }

    fn step(&self, states: &[&Self::State], prev: &[u32]) -> Result<Vec<Step<Self::State>>> {
        let wide = |v: Vec<T>| v.into_iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect();
        Ok(self
            .model
            .decode_step(&self.enc, states, prev)?
            .into_iter()
            .map(|s| Step {
                log_probs: wide(s.log_probs),
                attention: wide(s.attention),
                state: s.state,
            })
            .collect())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LemmaPrediction {
    pub lemma: String,
    pub score: f64,
    /// At least one UNK was replaced by an input character.
    pub used_copy: bool,
    /// An UNK's attention peak sat on a tag, so the best character position
    /// was copied instead.
    pub tag_fallback: bool,
    /// An UNK could not be copied because the input has no characters.
    pub failed: bool,
}

fn argmax(weights: &[f64], allowed: impl Fn(usize) -> bool) -> Option<usize> {
    weights
        .iter()
        .enumerate()
        .filter(|&(i, _)| allowed(i))
        .fold(None, |best: Option<(usize, f64)>, (i, &w)| match best {
            Some((_, b)) if b >= w => best,
            _ => Some((i, w)),
        })
        .map(|(i, _)| i)
}

/// Spell out a hypothesis, replacing each UNK with the input character at
/// the attention peak of that step.
pub fn replace_unks<S>(h: &Hypothesis<S>, input: &[Symbol], output_vocab: &Vocabulary) -> LemmaPrediction {
    let mut p = LemmaPrediction {
        lemma: String::with_capacity(h.output.len()),
        score: h.log_prob,
        used_copy: false,
        tag_fallback: false,
        failed: false,
    };
    for (t, &id) in h.output.iter().enumerate() {
        match output_vocab.symbol(id) {
            Symbol::Char(c) => p.lemma.push(*c),
            Symbol::Special(Special::Unk) => {
                let weights = h.attention.get(t).map(Vec::as_slice).unwrap_or(&[]);
                let is_char = |i: usize| input.get(i).is_some_and(Symbol::is_char);
                let peak = argmax(weights, |i| i < input.len());
                let pos = match peak {
                    Some(i) if is_char(i) => Some(i),
                    _ => {
                        let fallback = argmax(weights, is_char)
                            .or_else(|| input.iter().position(Symbol::is_char));
                        p.tag_fallback |= fallback.is_some();
                        fallback
                    }
                };
                match pos.map(|i| &input[i]) {
                    Some(Symbol::Char(c)) => {
                        p.lemma.push(*c);
                        p.used_copy = true;
                    }
                    _ => {
                        p.lemma.push(REPLACEMENT);
                        p.failed = true;
                    }
                }
            }
            other => {
                // Only BOS or EOS can land here, and neither is ever emitted.
                log::warn!("unexpected output symbol {other}");
                p.lemma.push(REPLACEMENT);
                p.failed = true;
            }
        }
    }
    p
}

/// Output length limit for an input with `form_chars` characters.
pub fn max_output_len(form_chars: usize) -> usize {
    (2 * form_chars + 8).max(16)
}

/// Decode one encoded input and return the top hypothesis with its spelled
/// out prediction.
pub fn decode_symbols<T: Scalar>(
    model: &Seq2SeqModel<T>,
    input: &[Symbol],
    beam_size: usize,
) -> Result<(LemmaPrediction, Hypothesis<DecoderState<T>>)> {
    let ids = ids_of(input, &model.input_vocab);
    let source = EncodedSource::new(model, &ids)?;
    let chars = input.iter().filter(|s| s.is_char()).count();
    let top = beam_search(&source, beam_size, max_output_len(chars))?
        .into_iter()
        .next()
        .expect("beam search returns at least one hypothesis");
    Ok((replace_unks(&top, input, &model.output_vocab), top))
}

pub fn predict_symbols<T: Scalar>(model: &Seq2SeqModel<T>, input: &[Symbol], beam_size: usize) -> Result<LemmaPrediction> {
    decode_symbols(model, input, beam_size).map(|(p, _)| p)
}

/// Lemmatize one tagged token with the model's beam size.
pub fn lemmatize_token<T: Scalar>(model: &Seq2SeqModel<T>, t: &Token) -> Result<LemmaPrediction> {
    let ex = encode_example(t)?;
    predict_symbols(model, &ex.input, model.hyper.beam_size)
}

/// Attention trace as CSV: one row per output step, one column per input
/// symbol.
pub fn write_attention_csv<S, W: Write>(
    h: &Hypothesis<S>,
    input: &[Symbol],
    output_vocab: &Vocabulary,
    w: W,
) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let mut header = vec!["output".to_owned()];
    header.extend(input.iter().map(Symbol::to_string));
    out.write_record(&header).map_err(crate::ambiguity::csv_err)?;
    for (id, weights) in h.output.iter().zip(&h.attention) {
        let mut row = vec![output_vocab.symbol(*id).to_string()];
        row.extend(weights.iter().map(|w| format!("{w:.6}")));
        out.write_record(&row).map_err(crate::ambiguity::csv_err)?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PredictStats {
    pub tokens: usize,
    pub cache_hits: usize,
    /// Distinct (form, tags) keys sent to the model.
    pub decoded_keys: usize,
    pub copies: usize,
    pub failed: usize,
}

/// Cache lookup, then one decode per distinct key, then fan-out.
pub struct Lemmatizer<'a> {
    model: &'a Seq2SeqModel<f32>,
    cache: Option<&'a LemmaCache>,
    workers: usize,
    decodes: AtomicUsize,
}

impl<'a> Lemmatizer<'a> {
    pub fn new(model: &'a Seq2SeqModel<f32>) -> Self {
        Lemmatizer {
            model,
            cache: None,
            workers: 1,
            decodes: AtomicUsize::new(0),
        }
    }

    pub fn with_cache(mut self, cache: &'a LemmaCache) -> Self {
        self.cache = Some(cache);
        self
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers.max(1);
        self
    }

    /// Model decodes run so far.
    pub fn decode_count(&self) -> usize {
        self.decodes.load(AtomicOrdering::Relaxed)
    }

    fn decode(&self, t: &Token) -> Result<LemmaPrediction> {
        self.decodes.fetch_add(1, AtomicOrdering::Relaxed);
        lemmatize_token(self.model, t)
    }

    /// Fill the LEMMA column of every token.
    pub fn lemmatize(&self, tb: &mut Treebank) -> Result<PredictStats> {
        let mut stats = PredictStats::default();
        let mut pending: BTreeMap<CacheKey, (Token, Vec<(usize, usize)>)> = BTreeMap::new();
        for (si, s) in tb.sentences.iter_mut().enumerate() {
            for (ti, t) in s.tokens.iter_mut().enumerate() {
                stats.tokens += 1;
                if let Some(lemma) = self.cache.and_then(|c| c.lookup(t)) {
                    t.lemma = Some(lemma.to_owned());
                    stats.cache_hits += 1;
                    continue;
                }
                pending
                    .entry(CacheKey::of(t))
                    .or_insert_with(|| (t.clone(), Vec::new()))
                    .1
                    .push((si, ti));
            }
        }
        stats.decoded_keys = pending.len();
        let jobs: Vec<&Token> = pending.values().map(|(t, _)| t).collect();
        let results = self.decode_all(&jobs)?;
        for ((_, positions), p) in pending.values().zip(results) {
            stats.copies += usize::from(p.used_copy) * positions.len();
            stats.failed += usize::from(p.failed) * positions.len();
            for &(si, ti) in positions {
                tb.sentences[si].tokens[ti].lemma = Some(p.lemma.clone());
            }
        }
        Ok(stats)
    }

    fn decode_all(&self, jobs: &[&Token]) -> Result<Vec<LemmaPrediction>> {
        if self.workers == 1 || jobs.len() < 2 {
            return jobs.iter().map(|t| self.decode(t)).collect();
        }
        let chunk = jobs.len().div_ceil(self.workers);
        std::thread::scope(|scope| {
            let handles: Vec<_> = jobs
                .chunks(chunk)
                .map(|part| scope.spawn(move || part.iter().map(|t| self.decode(t)).collect::<Result<Vec<_>>>()))
                .collect();
            let mut out = Vec::with_capacity(jobs.len());
            for h in handles {
                out.extend(h.join().expect("decode worker panicked")?);
            }
            Ok(out)
        })
    }
}
