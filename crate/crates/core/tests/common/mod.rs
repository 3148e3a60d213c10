#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ulem::codec::{build_vocabularies, Symbol, TrainingExample, WeightGroup};
use ulem::conllu::{Features, Sentence, Token, Treebank};
use ulem::inference::{Step, StepModel};
use ulem::model::{HyperParams, PreparedExample, Seq2SeqModel};
use ulem::nn::{Graph, ParamStore, Tensor, Var};
use ulem::Result;

// ---------------------------------------------------------------------------
// Finite-difference gradient checks

pub const EPS: f64 = 1e-4;

/// Relative agreement with an absolute floor of 1e-6.
pub fn agrees(analytic: f64, numeric: f64, rel: f64) -> bool {
    let d = (analytic - numeric).abs();
    d <= 1e-6 || d <= rel * analytic.abs().max(numeric.abs())
}

type Build = Box<dyn Fn(&mut Graph<'_, f64>, &[Var]) -> Result<Var>>;

struct OpCase {
    shapes: Vec<[usize; 2]>,
    build: Build,
    /// Dropout mask seed, when the op needs training mode.
    training: Option<u64>,
}

pub const OPS: &[&str] = &[
    "matmul",
    "add",
    "add_row",
    "mul",
    "sigmoid",
    "tanh",
    "slice_cols",
    "concat_cols",
    "softmax",
    "masked_softmax",
    "log_softmax",
    "embed",
    "dropout",
    "blend_rows",
    "cross_entropy",
    "interleave",
    "batched_dot",
    "weighted_sum",
    "sum",
    "scale",
];

fn op_case(name: &str, rng: &mut ChaCha8Rng) -> OpCase {
    let r = rng.gen_range(1..=3);
    let c = rng.gen_range(2..=4);
    let k = rng.gen_range(1..=4);
    let case = |shapes: Vec<[usize; 2]>, build: Build| OpCase {
        shapes,
        build,
        training: None,
    };
    match name {
        "matmul" => case(vec![[r, k], [k, c]], Box::new(|g, v| g.matmul(v[0], v[1]))),
        "add" => case(vec![[r, c], [r, c]], Box::new(|g, v| g.add(v[0], v[1]))),
        "add_row" => case(vec![[r, c], [1, c]], Box::new(|g, v| g.add_row(v[0], v[1]))),
        "mul" => case(vec![[r, c], [r, c]], Box::new(|g, v| g.mul(v[0], v[1]))),
        "sigmoid" => case(vec![[r, c]], Box::new(|g, v| Ok(g.sigmoid(v[0])))),
        "tanh" => case(vec![[r, c]], Box::new(|g, v| Ok(g.tanh(v[0])))),
        "slice_cols" => {
            let start = rng.gen_range(0..c);
            let width = rng.gen_range(1..=c - start);
            case(vec![[r, c]], Box::new(move |g, v| g.slice_cols(v[0], start, width)))
        }
        "concat_cols" => case(
            vec![[r, c], [r, k], [r, 1]],
            Box::new(|g, v| g.concat_cols(&[v[0], v[1], v[2]])),
        ),
        "softmax" => case(vec![[r, c]], Box::new(|g, v| Ok(g.softmax(v[0])))),
        "masked_softmax" => {
            let lengths: Vec<usize> = (0..r).map(|_| rng.gen_range(1..=c)).collect();
            case(vec![[r, c]], Box::new(move |g, v| g.masked_softmax(v[0], &lengths)))
        }
        "log_softmax" => case(vec![[r, c]], Box::new(|g, v| Ok(g.log_softmax(v[0])))),
        "embed" => {
            let n = rng.gen_range(1..=5);
            let ids: Vec<u32> = (0..n).map(|_| rng.gen_range(0..k as u32)).collect();
            case(vec![[k, c]], Box::new(move |g, v| g.embed(v[0], &ids)))
        }
        "dropout" => OpCase {
            shapes: vec![[r, c]],
            build: Box::new(|g, v| Ok(g.dropout(v[0], 0.3))),
            training: Some(rng.gen()),
        },
        "blend_rows" => {
            let mask: Vec<bool> = (0..r).map(|_| rng.gen()).collect();
            case(vec![[r, c], [r, c]], Box::new(move |g, v| g.blend_rows(v[0], v[1], &mask)))
        }
        "cross_entropy" => {
            let targets: Vec<u32> = (0..r).map(|_| rng.gen_range(0..c as u32)).collect();
            let weights: Vec<f64> = (0..r).map(|_| rng.gen_range(0.0..1.0)).collect();
            case(vec![[r, c]], Box::new(move |g, v| g.cross_entropy(v[0], &targets, &weights)))
        }
        "interleave" => case(
            vec![[r, c]; 3],
            Box::new(|g, v| g.interleave(&[v[0], v[1], v[2]])),
        ),
        "batched_dot" => case(vec![[r, c], [r * k, c]], Box::new(|g, v| g.batched_dot(v[0], v[1]))),
        "weighted_sum" => case(vec![[r, k], [r * k, c]], Box::new(|g, v| g.weighted_sum(v[0], v[1]))),
        "sum" => case(vec![[r, c]], Box::new(|g, v| Ok(g.sum(v[0])))),
        "scale" => case(vec![[r, c]], Box::new(|g, v| Ok(g.scale(v[0], -1.7)))),
        other => panic!("no gradient case for {other}"),
    }
}

fn graph(store: &ParamStore<f64>, training: Option<u64>) -> Graph<'_, f64> {
    match training {
        Some(seed) => Graph::training(store, ChaCha8Rng::seed_from_u64(seed)),
        None => Graph::new(store),
    }
}

/// Forward pass reduced to a scalar through fixed random output weights.
fn project(g: &mut Graph<'_, f64>, out: Var, weights: &Tensor<f64>) -> Result<Var> {
    let w = g.constant(weights.clone());
    let prod = g.mul(out, w)?;
    Ok(g.sum(prod))
}

/// Check one op on one seeded instance. Returns the largest absolute gap
/// between analytic and numeric gradients.
pub fn check_op(name: &str, seed: u64) -> std::result::Result<f64, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let case = op_case(name, &mut rng);
    let mut store = ParamStore::<f64>::new();
    let ids: Vec<_> = case
        .shapes
        .iter()
        .enumerate()
        .map(|(i, s)| store.add_uniform(format!("x{i}"), s[0], s[1], 1.0, &mut rng))
        .collect();

    let out_shape = {
        let mut g = graph(&store, case.training);
        let vars: Vec<Var> = ids.iter().map(|&id| g.param(id)).collect();
        let out = (case.build)(&mut g, &vars).map_err(|e| format!("{name}: {e}"))?;
        g.shape(out)
    };
    let proj = Tensor::from_vec(
        out_shape[0],
        out_shape[1],
        (0..out_shape[0] * out_shape[1]).map(|_| rng.gen_range(-1.0..1.0)).collect(),
    )
    .expect("shape");

    let loss_of = |store: &ParamStore<f64>| -> Result<f64> {
        let mut g = graph(store, case.training);
        let vars: Vec<Var> = ids.iter().map(|&id| g.param(id)).collect();
        let out = (case.build)(&mut g, &vars)?;
        let loss = project(&mut g, out, &proj)?;
        Ok(g.value(loss).item())
    };
    let grads = {
        let mut g = graph(&store, case.training);
        let vars: Vec<Var> = ids.iter().map(|&id| g.param(id)).collect();
        let out = (case.build)(&mut g, &vars).map_err(|e| e.to_string())?;
        let loss = project(&mut g, out, &proj).map_err(|e| e.to_string())?;
        g.backward(loss).map_err(|e| e.to_string())?
    };

    let mut worst: f64 = 0.0;
    for &id in &ids {
        for i in 0..store.value(id).data().len() {
            let orig = store.value(id).data()[i];
            store.get_mut(id).value.data_mut()[i] = orig + EPS;
            let plus = loss_of(&store).map_err(|e| e.to_string())?;
            store.get_mut(id).value.data_mut()[i] = orig - EPS;
            let minus = loss_of(&store).map_err(|e| e.to_string())?;
            store.get_mut(id).value.data_mut()[i] = orig;
            let numeric = (plus - minus) / (2.0 * EPS);
            let analytic = grads.entry(id, i);
            if !agrees(analytic, numeric, 1e-3) {
                return Err(format!(
                    "{name} seed {seed}: param {} [{i}] analytic {analytic} numeric {numeric}",
                    store.get(id).name
                ));
            }
            worst = worst.max((analytic - numeric).abs());
        }
    }
    Ok(worst)
}

pub fn tiny_model_f64(seed: u64) -> (Seq2SeqModel<f64>, Vec<PreparedExample>) {
    let words = [("walks", "walk", "VERB"), ("dogs", "dog", "NOUN")];
    let exs: Vec<TrainingExample> = words
        .iter()
        .map(|(f, l, u)| example(f, l, &[&format!("UPOS={u}"), "Number=Plur"]))
        .collect();
    let (iv, ov) = build_vocabularies(&exs, 1);
    let hyper = HyperParams {
        embedding_dim: 3,
        hidden_dim: 4,
        init_range: 0.5,
        seed,
        ..HyperParams::default()
    };
    let model = Seq2SeqModel::<f64>::new(hyper, iv, ov).expect("model");
    let prepared = exs.iter().map(|e| PreparedExample::new(&model, e)).collect();
    (model, prepared)
}

pub fn example(form: &str, lemma: &str, tags: &[&str]) -> TrainingExample {
    let mut input: Vec<Symbol> = form.chars().map(Symbol::Char).collect();
    input.extend(tags.iter().map(|t| Symbol::tag(*t)));
    let mut output: Vec<Symbol> = lemma.chars().map(Symbol::Char).collect();
    output.push(Symbol::Special(ulem::codec::Special::Eos));
    TrainingExample {
        input,
        output,
        group: WeightGroup::Gold,
    }
}

/// Full-model check on `samples` random parameter entries. Returns the
/// largest absolute gap.
pub fn check_full_model(seed: u64, samples: usize, rel: f64) -> std::result::Result<f64, String> {
    let (mut model, prepared) = tiny_model_f64(seed);
    let batch: Vec<&PreparedExample> = prepared.iter().collect();
    let (_, grads) = model.loss_and_gradients(&batch).map_err(|e| e.to_string())?;
    let ids: Vec<_> = model.params.iter().map(|(id, _)| id).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xfeed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let id = ids[rng.gen_range(0..ids.len())];
        let i = rng.gen_range(0..model.params.value(id).data().len());
        let orig = model.params.value(id).data()[i];
        let mut at = |v: f64| {
            model.params.get_mut(id).value.data_mut()[i] = v;
            model.loss_and_gradients(&batch).map(|(l, _)| l).map_err(|e| e.to_string())
        };
        let plus = at(orig + EPS)?;
        let minus = at(orig - EPS)?;
        at(orig)?;
        let numeric = (plus - minus) / (2.0 * EPS);
        let analytic = grads.entry(id, i);
        if !agrees(analytic, numeric, rel) {
            return Err(format!(
                "{} [{i}]: analytic {analytic} numeric {numeric}",
                model.params.get(id).name
            ));
        }
        worst = worst.max((analytic - numeric).abs());
    }
    Ok(worst)
}

// ---------------------------------------------------------------------------
// Stub decoders and the exhaustive oracle

pub const BOS: u32 = 0;
pub const EOS: u32 = 1;

/// Log-probabilities drawn from a small set of dyadic values so that scores
/// add exactly and ties are common. The distribution depends on the whole
/// prefix.
pub struct TableModel {
    pub vocab: usize,
    pub seed: u64,
    pub levels: Vec<f64>,
}

impl TableModel {
    pub fn random(seed: u64, vocab: usize) -> Self {
        TableModel {
            vocab,
            seed,
            levels: vec![-0.5, -1.0, -1.5, -2.0, -3.0],
        }
    }

    fn scores(&self, prefix: &[u32]) -> Vec<f64> {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325 ^ self.seed;
        for &id in prefix {
            h = (h ^ u64::from(id + 1)).wrapping_mul(0x0100_0000_01b3);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(h);
        (0..self.vocab)
            .map(|_| self.levels[rng.gen_range(0..self.levels.len())])
            .collect()
    }
}

impl StepModel for TableModel {
    type State = Vec<u32>;

    fn bos(&self) -> u32 {
        BOS
    }

    fn eos(&self) -> u32 {
        EOS
    }

    fn initial_state(&self) -> Vec<u32> {
        Vec::new()
    }

    fn step(&self, states: &[&Vec<u32>], prev: &[u32]) -> Result<Vec<Step<Vec<u32>>>> {
        Ok(states
            .iter()
            .zip(prev)
            .map(|(s, &p)| {
                let mut next = (*s).clone();
                if p != BOS {
                    next.push(p);
                }
                Step {
                    log_probs: self.scores(&next),
                    attention: vec![1.0],
                    state: next,
                }
            })
            .collect())
    }
}

/// Every complete output (EOS within `max_len` steps, or cut at `max_len`),
/// ranked by score then ids.
pub fn exhaustive(m: &TableModel, max_len: usize) -> Vec<(Vec<u32>, f64)> {
    let mut out = Vec::new();
    let mut frontier = vec![(Vec::<u32>::new(), 0.0)];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for (prefix, score) in frontier {
            let s = m.scores(&prefix);
            for id in 0..m.vocab as u32 {
                if id == BOS {
                    continue;
                }
                let total = score + s[id as usize];
                if id == EOS {
                    out.push((prefix.clone(), total));
                } else {
                    let mut p = prefix.clone();
                    p.push(id);
                    next.push((p, total));
                }
            }
        }
        frontier = next;
    }
    out.extend(frontier);
    out.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    out
}

// ---------------------------------------------------------------------------
// Random corpora and brute-force recounts

pub fn random_corpus(rng: &mut ChaCha8Rng) -> Treebank {
    const FORMS: &[&str] = &["a", "b", "c", "d"];
    const LEMMAS: &[&str] = &["x", "y", "z"];
    const UPOS: &[Option<&str>] = &[Some("NOUN"), Some("VERB"), None];
    const FEATS: &[&str] = &["_", "Number=Sing", "Case=Nom|Number=Plur"];
    let sentences = (0..rng.gen_range(0..5))
        .map(|_| {
            let toks = (0..rng.gen_range(1..7))
                .map(|i| {
                    let mut t = Token::new(i + 1, FORMS[rng.gen_range(0..FORMS.len())])
                        .with_lemma(LEMMAS[rng.gen_range(0..LEMMAS.len())])
                        .with_feats(Features::parse(FEATS[rng.gen_range(0..FEATS.len())]).unwrap());
                    if let Some(u) = UPOS[rng.gen_range(0..UPOS.len())] {
                        t = t.with_upos(u);
                    }
                    t
                })
                .collect();
            Sentence::from_tokens(toks)
        })
        .collect();
    Treebank::new("random", sentences)
}

/// (total, form-ambiguous, tag-ambiguous) by pairwise comparison.
pub fn brute_ambiguity(tb: &Treebank) -> (usize, usize, usize) {
    let toks: Vec<&Token> = tb.tokens().collect();
    let mut form_amb = 0;
    let mut tag_amb = 0;
    for t in &toks {
        let mut form_lemma_differs = false;
        let mut tag_lemma_differs = false;
        for u in &toks {
            if u.form == t.form && u.lemma != t.lemma {
                form_lemma_differs = true;
                if u.upos == t.upos && u.xpos == t.xpos && u.feats == t.feats {
                    tag_lemma_differs = true;
                }
            }
        }
        form_amb += usize::from(form_lemma_differs);
        tag_amb += usize::from(tag_lemma_differs);
    }
    (toks.len(), form_amb, tag_amb)
}

/// Skew rows (form, tags, lemma1, count1, lemma2, count2) by brute force.
pub fn brute_skew(tb: &Treebank, k: usize) -> Vec<(String, String, String, usize, String, usize)> {
    let toks: Vec<&Token> = tb.tokens().collect();
    let mut keys: Vec<(String, String)> = Vec::new();
    for t in &toks {
        let key = (t.form.clone(), t.tag_string());
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    let mut rows = Vec::new();
    for (form, tags) in keys {
        let mut lemmas: Vec<(String, usize)> = Vec::new();
        for t in &toks {
            if t.form == form && t.tag_string() == tags {
                let l = t.lemma.clone().unwrap();
                match lemmas.iter_mut().find(|(x, _)| *x == l) {
                    Some(e) => e.1 += 1,
                    None => lemmas.push((l, 1)),
                }
            }
        }
        if lemmas.len() < 2 {
            continue;
        }
        let total: usize = lemmas.iter().map(|(_, c)| c).sum();
        // Selection sort by (count desc, lemma asc).
        for i in 0..lemmas.len() {
            for j in i + 1..lemmas.len() {
                let better = lemmas[j].1 > lemmas[i].1 || (lemmas[j].1 == lemmas[i].1 && lemmas[j].0 < lemmas[i].0);
                if better {
                    lemmas.swap(i, j);
                }
            }
        }
        rows.push((
            total,
            (form, tags, lemmas[0].0.clone(), lemmas[0].1, lemmas[1].0.clone(), lemmas[1].1),
        ));
    }
    rows.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| a.1 .0.cmp(&b.1 .0)).then_with(|| a.1 .1.cmp(&b.1 .1)));
    rows.into_iter().take(k).map(|(_, r)| r).collect()
}

// ---------------------------------------------------------------------------
// The UNK copy walkthrough

pub struct Walkthrough {
    pub input: Vec<Symbol>,
    pub hypothesis: ulem::inference::Hypothesis<()>,
    pub output_vocab: ulem::codec::Vocabulary,
}

/// "Růžičkalla" with four tags, decoded as `R UNK UNK i UNK k a` where the
/// UNK steps attend most to ů, ž and č.
pub fn ruzicka() -> Walkthrough {
    let mut input: Vec<Symbol> = "Růžičkalla".chars().map(Symbol::Char).collect();
    for t in ["UPOS=PROPN", "XPOS=N", "Case=Ade", "Number=Sing"] {
        input.push(Symbol::tag(t));
    }
    // An output vocabulary that knows R, i, k, a but none of ů, ž, č.
    let train = example("Rika", "Rika", &[]);
    let (_, ov) = build_vocabularies(&[train], 1);
    let id = |c: char| ov.id(&Symbol::Char(c)).unwrap();
    let unk = ulem::codec::Vocabulary::UNK;
    let output = vec![id('R'), unk, unk, id('i'), unk, id('k'), id('a')];
    let peaks = [0usize, 1, 2, 3, 4, 5, 6];
    let attention = peaks
        .iter()
        .map(|&p| {
            let mut w = vec![0.02; input.len()];
            w[p] = 1.0 - 0.02 * (input.len() - 1) as f64;
            w
        })
        .collect();
    Walkthrough {
        input,
        hypothesis: ulem::inference::Hypothesis {
            output,
            log_prob: -0.5,
            attention,
            state: (),
            ended: true,
        },
        output_vocab: ov,
    }
}

// ---------------------------------------------------------------------------
// Lexicon pairs

pub fn random_lexicon_pair(rng: &mut ChaCha8Rng) -> (Vec<ulem::lexicon::LexiconEntry>, Treebank) {
    const FORMS: &[&str] = &["a", "b", "c", "d", "e"];
    const LEMMAS: &[&str] = &["x", "y", "z"];
    let lex = (0..rng.gen_range(0..8))
        .map(|_| ulem::lexicon::LexiconEntry {
            form: FORMS[rng.gen_range(0..FORMS.len())].into(),
            lemma: LEMMAS[rng.gen_range(0..LEMMAS.len())].into(),
            upos: Some("NOUN".into()),
            xpos: None,
            feats: Features::new(),
        })
        .collect();
    let toks = (0..rng.gen_range(1..10))
        .map(|i| {
            Token::new(i + 1, FORMS[rng.gen_range(0..FORMS.len())]).with_lemma(LEMMAS[rng.gen_range(0..LEMMAS.len())])
        })
        .collect();
    (lex, Treebank::new("t", vec![Sentence::from_tokens(toks)]))
}

// ---------------------------------------------------------------------------
// Synthetic experiments

pub fn accuracy_split(pred: &Treebank, gold: &Treebank, held_out: &[bool]) -> (f64, f64) {
    let (mut s, mut sn, mut h, mut hn) = (0usize, 0usize, 0usize, 0usize);
    for ((p, g), held) in pred.tokens().zip(gold.tokens()).zip(held_out) {
        let ok = usize::from(p.lemma == g.lemma);
        if *held {
            hn += 1;
            h += ok;
        } else {
            sn += 1;
            s += ok;
        }
    }
    (s as f64 / sn.max(1) as f64, h as f64 / hn.max(1) as f64)
}

pub fn lemmas(tb: &Treebank) -> Vec<Option<String>> {
    tb.tokens().map(|t| t.lemma.clone()).collect()
}

/// Distinct (form, tags) types among tokens, with the held-out flag.
pub fn type_keys(tb: &Treebank, held_out: &[bool]) -> BTreeMap<(String, String), bool> {
    tb.tokens()
        .zip(held_out)
        .map(|(t, h)| ((t.form.clone(), t.tag_string()), *h))
        .collect()
}

pub fn distinct<T: Ord + Clone>(items: &[T]) -> BTreeSet<T> {
    items.iter().cloned().collect()
}
