//! The attentional encoder-decoder.
//!
//! Encoder: input embeddings feeding two bidirectional LSTM layers. The
//! forward and backward top-layer states at each position are concatenated
//! and projected to `hidden_dim`, giving one annotation per input symbol.
//!
//! Decoder: output embeddings concatenated with the previous attentional
//! state (input feeding), two LSTM layers, bilinear attention over the
//! annotations, `tanh(W [context; h])` as the attentional state, and a linear
//! projection to output-vocabulary logits.

mod hyper;
mod io;
mod train;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use hyper::HyperParams;
pub use io::{load_model, load_model_file, save_model, save_model_file, FORMAT_VERSION, MAGIC};
pub use train::{
    batch_size_for, learning_rate, train, EpochRecord, PreparedExample, TrainingLog,
};

use crate::codec::{ids_of, TrainingExample, Vocabulary};
use crate::error::{Error, Result};
use crate::nn::{Gradients, Graph, ParamId, ParamStore, Scalar, Tensor, Var};

const LAYERS: usize = 2;

#[derive(Clone, Copy, Debug)]
struct LstmParams {
    /// `(input + hidden) x 4*hidden`, gate order input, forget, cell, output.
    weight: ParamId,
    bias: ParamId,
}

#[derive(Clone, Copy, Debug)]
struct Linear {
    weight: ParamId,
    bias: Option<ParamId>,
}

#[derive(Clone, Debug)]
struct Layout {
    src_embed: ParamId,
    /// `[layer][direction]`, direction 0 is left-to-right.
    encoder: [[LstmParams; 2]; LAYERS],
    enc_proj: Linear,
    init_h: [Linear; LAYERS],
    init_c: [Linear; LAYERS],
    tgt_embed: ParamId,
    decoder: [LstmParams; LAYERS],
    attn_score: Linear,
    attn_out: Linear,
    out: Linear,
}

#[derive(Clone, Debug)]
pub struct Seq2SeqModel<T: Scalar = f32> {
    pub hyper: HyperParams,
    pub input_vocab: Vocabulary,
    pub output_vocab: Vocabulary,
    pub params: ParamStore<T>,
    layout: Layout,
}

/// Recurrent state of the decoder for one hypothesis.
#[derive(Clone, Debug, PartialEq)]
pub struct DecoderState<T: Scalar = f32> {
    pub h: [Tensor<T>; LAYERS],
    pub c: [Tensor<T>; LAYERS],
    /// Attentional state of the previous step, fed into the next input.
    pub feed: Tensor<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EncoderOutput<T: Scalar = f32> {
    /// `len x hidden`, one row per input symbol.
    pub annotations: Tensor<T>,
    pub initial_state: DecoderState<T>,
}

impl<T: Scalar> EncoderOutput<T> {
    pub fn len(&self) -> usize {
        self.annotations.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.annotations.rows() == 0
    }
}

/// One decoding step for one hypothesis.
#[derive(Clone, Debug)]
pub struct StepOutput<T: Scalar = f32> {
    pub log_probs: Vec<T>,
    pub attention: Vec<T>,
    pub state: DecoderState<T>,
}

/// Encoder results inside a graph.
pub(crate) struct EncodedBatch {
    pub annotations: Var,
    pub lengths: Vec<usize>,
    pub init_h: [Var; LAYERS],
    pub init_c: [Var; LAYERS],
}

pub(crate) struct StepVars {
    pub h: [Var; LAYERS],
    pub c: [Var; LAYERS],
    pub feed: Var,
}

impl<T: Scalar> Seq2SeqModel<T> {
    /// A freshly initialized model: weights uniform in `[-init_range,
    /// init_range]`, LSTM forget-gate biases 1.
    pub fn new(hyper: HyperParams, input_vocab: Vocabulary, output_vocab: Vocabulary) -> Result<Self> {
        hyper.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(hyper.seed);
        let mut params = ParamStore::new();
        let (e, h, r) = (hyper.embedding_dim, hyper.hidden_dim, hyper.init_range);

        let src_embed = params.add_uniform("src_embed", input_vocab.len(), e, r, &mut rng);
        let encoder = [
            [
                add_lstm(&mut params, &mut rng, "enc.l0.fwd", e, h, r),
                add_lstm(&mut params, &mut rng, "enc.l0.bwd", e, h, r),
            ],
            [
                add_lstm(&mut params, &mut rng, "enc.l1.fwd", 2 * h, h, r),
                add_lstm(&mut params, &mut rng, "enc.l1.bwd", 2 * h, h, r),
            ],
        ];
        let mut lin = |name: &str, i: usize, o: usize, bias: bool| {
            add_linear(&mut params, &mut rng, name, i, o, bias, r)
        };
        let enc_proj = lin("enc.proj", 2 * h, h, false);
        let init_h = [lin("init.l0.h", 2 * h, h, true), lin("init.l1.h", 2 * h, h, true)];
        let init_c = [lin("init.l0.c", 2 * h, h, true), lin("init.l1.c", 2 * h, h, true)];
        let attn_score = lin("attn.score", h, h, false);
        let attn_out = lin("attn.out", 2 * h, h, false);
        let out = lin("out", h, output_vocab.len(), true);
        let tgt_embed = params.add_uniform("tgt_embed", output_vocab.len(), e, r, &mut rng);
        let decoder = [
            add_lstm(&mut params, &mut rng, "dec.l0", e + h, h, r),
            add_lstm(&mut params, &mut rng, "dec.l1", h, h, r),
        ];

        Ok(Seq2SeqModel {
            hyper,
            input_vocab,
            output_vocab,
            params,
            layout: Layout {
                src_embed,
                encoder,
                enc_proj,
                init_h,
                init_c,
                tgt_embed,
                decoder,
                attn_score,
                attn_out,
                out,
            },
        })
    }

    /// Same model with another element type.
    pub fn cast<U: Scalar>(&self) -> Seq2SeqModel<U> {
        Seq2SeqModel {
            hyper: self.hyper.clone(),
            input_vocab: self.input_vocab.clone(),
            output_vocab: self.output_vocab.clone(),
            params: self.params.cast(),
            layout: self.layout.clone(),
        }
    }

    pub fn hidden_dim(&self) -> usize {
        self.hyper.hidden_dim
    }

    pub fn input_ids(&self, ex: &TrainingExample) -> Vec<u32> {
        ids_of(&ex.input, &self.input_vocab)
    }

    pub fn output_ids(&self, ex: &TrainingExample) -> Vec<u32> {
        ids_of(&ex.output, &self.output_vocab)
    }

    fn linear(&self, g: &mut Graph<'_, T>, l: Linear, x: Var) -> Result<Var> {
        let w = g.param(l.weight);
        let y = g.matmul(x, w)?;
        match l.bias {
            Some(b) => {
                let b = g.param(b);
                g.add_row(y, b)
            }
            None => Ok(y),
        }
    }

    fn lstm_cell(
        &self,
        g: &mut Graph<'_, T>,
        p: LstmParams,
        x: Var,
        h: Var,
        c: Var,
    ) -> Result<(Var, Var)> {
        let hd = self.hyper.hidden_dim;
        let xh = g.concat_cols(&[x, h])?;
        let w = g.param(p.weight);
        let b = g.param(p.bias);
        let pre = g.matmul(xh, w)?;
        let pre = g.add_row(pre, b)?;
        let i = g.slice_cols(pre, 0, hd)?;
        let i = g.sigmoid(i);
        let f = g.slice_cols(pre, hd, hd)?;
        let f = g.sigmoid(f);
        let cand = g.slice_cols(pre, 2 * hd, hd)?;
        let cand = g.tanh(cand);
        let o = g.slice_cols(pre, 3 * hd, hd)?;
        let o = g.sigmoid(o);
        let kept = g.mul(f, c)?;
        let added = g.mul(i, cand)?;
        let c_new = g.add(kept, added)?;
        let squashed = g.tanh(c_new);
        let h_new = g.mul(o, squashed)?;
        Ok((h_new, c_new))
    }

    /// Encode a batch of id sequences, padded to the longest one.
    pub(crate) fn encode_batch(&self, g: &mut Graph<'_, T>, src: &[&[u32]]) -> Result<EncodedBatch> {
        let b = src.len();
        let lengths: Vec<usize> = src.iter().map(|s| s.len()).collect();
        if b == 0 || lengths.contains(&0) {
            return Err(Error::invalid("cannot encode an empty input sequence"));
        }
        let steps = *lengths.iter().max().expect("non-empty batch");
        let hd = self.hyper.hidden_dim;
        let p = self.hyper.dropout;

        let masks: Vec<Option<Vec<bool>>> = (0..steps)
            .map(|t| {
                let m: Vec<bool> = lengths.iter().map(|&l| t < l).collect();
                (!m.iter().all(|&x| x)).then_some(m)
            })
            .collect();

        let table = g.param(self.layout.src_embed);
        let mut inputs = Vec::with_capacity(steps);
        for t in 0..steps {
            let ids: Vec<u32> = src
                .iter()
                .map(|s| s.get(t).copied().unwrap_or(Vocabulary::EOS))
                .collect();
            let e = g.embed(table, &ids)?;
            inputs.push(g.dropout(e, p));
        }

        let mut init_h = Vec::with_capacity(LAYERS);
        let mut init_c = Vec::with_capacity(LAYERS);
        for layer in 0..LAYERS {
            let mut outputs: [Vec<Var>; 2] = [Vec::with_capacity(steps), Vec::with_capacity(steps)];
            let mut finals = Vec::with_capacity(2);
            for (dir, out) in outputs.iter_mut().enumerate() {
                let cell = self.layout.encoder[layer][dir];
                let mut h = g.zeros(b, hd);
                let mut c = g.zeros(b, hd);
                let order: Vec<usize> = if dir == 0 {
                    (0..steps).collect()
                } else {
                    (0..steps).rev().collect()
                };
                let mut states = vec![None; steps];
                for t in order {
                    let (h2, c2) = self.lstm_cell(g, cell, inputs[t], h, c)?;
                    // Padded steps keep the previous state, so the backward
                    // direction starts at each sequence's own last symbol.
                    (h, c) = match &masks[t] {
                        None => (h2, c2),
                        Some(m) => (g.blend_rows(h2, h, m)?, g.blend_rows(c2, c, m)?),
                    };
                    states[t] = Some(h);
                }
                out.extend(states.into_iter().map(|s| s.expect("every step visited")));
                finals.push((h, c));
            }
            let hs = g.concat_cols(&[finals[0].0, finals[1].0])?;
            let cs = g.concat_cols(&[finals[0].1, finals[1].1])?;
            let ih = self.linear(g, self.layout.init_h[layer], hs)?;
            init_h.push(g.tanh(ih));
            init_c.push(self.linear(g, self.layout.init_c[layer], cs)?);

            let [fwd, bwd] = outputs;
            inputs = fwd
                .into_iter()
                .zip(bwd)
                .map(|(f, b)| g.concat_cols(&[f, b]))
                .collect::<Result<_>>()?;
            if layer + 1 < LAYERS {
                inputs = inputs.into_iter().map(|x| g.dropout(x, p)).collect();
            }
        }

        let stacked = g.interleave(&inputs)?;
        let annotations = self.linear(g, self.layout.enc_proj, stacked)?;
        Ok(EncodedBatch {
            annotations,
            lengths,
            init_h: [init_h[0], init_h[1]],
            init_c: [init_c[0], init_c[1]],
        })
    }

    /// Bilinear attention of decoder states `h` over the annotations.
    /// Returns `(context, weights)`.
    pub(crate) fn attend_vars(&self, g: &mut Graph<'_, T>, h: Var, enc: &EncodedBatch) -> Result<(Var, Var)> {
        let w = g.param(self.layout.attn_score.weight);
        let q = g.matmul(h, w)?;
        let scores = g.batched_dot(q, enc.annotations)?;
        let weights = g.masked_softmax(scores, &enc.lengths)?;
        let context = g.weighted_sum(weights, enc.annotations)?;
        Ok((context, weights))
    }

    /// One decoder step for every batch row. Returns `(logits, attention,
    /// next state)`.
    pub(crate) fn decoder_step(
        &self,
        g: &mut Graph<'_, T>,
        enc: &EncodedBatch,
        state: &StepVars,
        prev: &[u32],
    ) -> Result<(Var, Var, StepVars)> {
        let p = self.hyper.dropout;
        let table = g.param(self.layout.tgt_embed);
        let e = g.embed(table, prev)?;
        let e = g.dropout(e, p);
        let x = g.concat_cols(&[e, state.feed])?;
        let (h0, c0) = self.lstm_cell(g, self.layout.decoder[0], x, state.h[0], state.c[0])?;
        let x1 = g.dropout(h0, p);
        let (h1, c1) = self.lstm_cell(g, self.layout.decoder[1], x1, state.h[1], state.c[1])?;
        let (context, weights) = self.attend_vars(g, h1, enc)?;
        let joined = g.concat_cols(&[context, h1])?;
        let attn = self.linear(g, self.layout.attn_out, joined)?;
        let attn = g.tanh(attn);
        let dropped = g.dropout(attn, p);
        let logits = self.linear(g, self.layout.out, dropped)?;
        Ok((
            logits,
            weights,
            StepVars {
                h: [h0, h1],
                c: [c0, c1],
                feed: attn,
            },
        ))
    }

    pub(crate) fn initial_step_vars(&self, g: &mut Graph<'_, T>, enc: &EncodedBatch) -> StepVars {
        let feed = g.zeros(enc.lengths.len(), self.hyper.hidden_dim);
        StepVars {
            h: enc.init_h,
            c: enc.init_c,
            feed,
        }
    }

    /// Teacher-forced cross-entropy summed over target symbols, and the number
    /// of target symbols. Targets end with EOS.
    pub(crate) fn batch_loss(
        &self,
        g: &mut Graph<'_, T>,
        batch: &[&PreparedExample],
    ) -> Result<(Var, usize)> {
        let src: Vec<&[u32]> = batch.iter().map(|e| e.input.as_slice()).collect();
        let enc = self.encode_batch(g, &src)?;
        let mut state = self.initial_step_vars(g, &enc);
        let steps = batch.iter().map(|e| e.output.len()).max().unwrap_or(0);
        let mut total = None;
        let mut count = 0;
        for t in 0..steps {
            let prev: Vec<u32> = batch
                .iter()
                .map(|e| match t {
                    0 => Vocabulary::BOS,
                    _ => e.output.get(t - 1).copied().unwrap_or(Vocabulary::EOS),
                })
                .collect();
            let targets: Vec<u32> = batch
                .iter()
                .map(|e| e.output.get(t).copied().unwrap_or(Vocabulary::EOS))
                .collect();
            let weights: Vec<T> = batch
                .iter()
                .map(|e| if t < e.output.len() { T::one() } else { T::zero() })
                .collect();
            count += batch.iter().filter(|e| t < e.output.len()).count();
            let (logits, _, next) = self.decoder_step(g, &enc, &state, &prev)?;
            let loss = g.cross_entropy(logits, &targets, &weights)?;
            total = Some(match total {
                None => loss,
                Some(acc) => g.add(acc, loss)?,
            });
            state = next;
        }
        let total = total.ok_or_else(|| Error::invalid("batch has no target symbols"))?;
        Ok((total, count))
    }

    /// Encode one input sequence in evaluation mode.
    pub fn encode(&self, input_ids: &[u32]) -> Result<EncoderOutput<T>> {
        let mut g = Graph::new(&self.params);
        let enc = self.encode_batch(&mut g, &[input_ids])?;
        let h = self.hyper.hidden_dim;
        Ok(EncoderOutput {
            annotations: g.value(enc.annotations).clone(),
            initial_state: DecoderState {
                h: [g.value(enc.init_h[0]).clone(), g.value(enc.init_h[1]).clone()],
                c: [g.value(enc.init_c[0]).clone(), g.value(enc.init_c[1]).clone()],
                feed: Tensor::zeros(1, h),
            },
        })
    }

    /// Attention of one top-layer decoder state (`1 x hidden`) over an encoded
    /// input. Returns `(context, weights)`.
    pub fn attend(&self, decoder_h: &Tensor<T>, enc: &EncoderOutput<T>) -> Result<(Tensor<T>, Vec<T>)> {
        let mut g = Graph::new(&self.params);
        let h = g.constant(decoder_h.clone());
        let batch = EncodedBatch {
            annotations: g.constant(enc.annotations.clone()),
            lengths: vec![enc.len()],
            init_h: [h, h],
            init_c: [h, h],
        };
        let (ctx, w) = self.attend_vars(&mut g, h, &batch)?;
        Ok((g.value(ctx).clone(), g.value(w).data().to_vec()))
    }

    /// Advance several hypotheses over the same encoded input by one step.
    pub fn decode_step(
        &self,
        enc: &EncoderOutput<T>,
        states: &[&DecoderState<T>],
        prev: &[u32],
    ) -> Result<Vec<StepOutput<T>>> {
        let n = states.len();
        let mut g = Graph::new(&self.params);
        let stack = |pick: &dyn Fn(&DecoderState<T>) -> &Tensor<T>| {
            let mut data = Vec::with_capacity(n * self.hyper.hidden_dim);
            for s in states {
                data.extend_from_slice(pick(s).data());
            }
            Tensor::from_vec(n, self.hyper.hidden_dim, data)
        };
        let h = [stack(&|s| &s.h[0])?, stack(&|s| &s.h[1])?];
        let c = [stack(&|s| &s.c[0])?, stack(&|s| &s.c[1])?];
        let feed = stack(&|s| &s.feed)?;
        let state = StepVars {
            h: [g.constant(h[0].clone()), g.constant(h[1].clone())],
            c: [g.constant(c[0].clone()), g.constant(c[1].clone())],
            feed: g.constant(feed),
        };
        let batch = EncodedBatch {
            annotations: g.constant(enc.annotations.repeat_rows(n)),
            lengths: vec![enc.len(); n],
            init_h: state.h,
            init_c: state.c,
        };
        let (logits, weights, next) = self.decoder_step(&mut g, &batch, &state, prev)?;
        let log_probs = g.log_softmax(logits);

        let row = |v: Var, r: usize| Tensor::row_vector(g.value(v).row(r).to_vec());
        Ok((0..n)
            .map(|r| StepOutput {
                log_probs: g.value(log_probs).row(r).to_vec(),
                attention: g.value(weights).row(r).to_vec(),
                state: DecoderState {
                    h: [row(next.h[0], r), row(next.h[1], r)],
                    c: [row(next.c[0], r), row(next.c[1], r)],
                    feed: row(next.feed, r),
                },
            })
            .collect())
    }

    /// Mean teacher-forced loss per target symbol, without dropout.
    pub fn evaluate_loss(&self, examples: &[&PreparedExample]) -> Result<T> {
        let mut g = Graph::new(&self.params);
        let (loss, count) = self.batch_loss(&mut g, examples)?;
        Ok(g.value(loss).item() / T::from_usize(count).expect("count"))
    }

    /// Summed teacher-forced loss without dropout, with its gradient.
    pub fn loss_and_gradients(&self, examples: &[&PreparedExample]) -> Result<(T, Gradients<T>)> {
        let mut g = Graph::new(&self.params);
        let (loss, _) = self.batch_loss(&mut g, examples)?;
        let value = g.value(loss).item();
        Ok((value, g.backward(loss)?))
    }
}

fn add_lstm<T: Scalar>(
    params: &mut ParamStore<T>,
    rng: &mut ChaCha8Rng,
    name: &str,
    input: usize,
    hidden: usize,
    range: f64,
) -> LstmParams {
    let weight = params.add_uniform(format!("{name}.w"), input + hidden, 4 * hidden, range, rng);
    let bias = params.add_uniform(format!("{name}.b"), 1, 4 * hidden, range, rng);
    for x in &mut params.get_mut(bias).value.data_mut()[hidden..2 * hidden] {
        *x = T::one();
    }
    LstmParams { weight, bias }
}

fn add_linear<T: Scalar>(
    params: &mut ParamStore<T>,
    rng: &mut ChaCha8Rng,
    name: &str,
    input: usize,
    output: usize,
    bias: bool,
    range: f64,
) -> Linear {
    Linear {
        weight: params.add_uniform(format!("{name}.w"), input, output, range, rng),
        bias: bias.then(|| params.add_uniform(format!("{name}.b"), 1, output, range, rng)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::{build_vocabularies, encode_parts, Symbol, WeightGroup};

    fn tiny() -> Seq2SeqModel<f64> {
        let exs: Vec<_> = ["abc", "bca", "cab"]
            .iter()
            .map(|w| encode_parts(w, Some(w), vec![Symbol::tag("UPOS=X")], WeightGroup::Gold).unwrap())
            .collect();
        let (iv, ov) = build_vocabularies(&exs, 1);
        let hyper = HyperParams {
            embedding_dim: 4,
            hidden_dim: 5,
            ..HyperParams::default()
        };
        Seq2SeqModel::new(hyper, iv, ov).unwrap()
    }

    #[test]
    fn one_annotation_per_symbol() {
        let m = tiny();
        assert_eq!(m.encode(&[4]).unwrap().len(), 1);
        assert_eq!(m.encode(&[4, 5, 6, 7, 4, 5, 6, 7, 4, 5, 6, 7, 4, 5]).unwrap().len(), 14);
        assert!(m.encode(&[]).is_err());
    }

    #[test]
    fn zero_weights_give_zero_annotations() {
        let mut m = tiny();
        let ids: Vec<ParamId> = m.params.iter().map(|(id, _)| id).collect();
        for id in ids {
            for x in m.params.get_mut(id).value.data_mut() {
                *x = 0.0;
            }
        }
        let enc = m.encode(&[4, 5, 6]).unwrap();
        assert!(enc.annotations.data().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn single_position_attention_is_certain() {
        let m = tiny();
        let enc = m.encode(&[5]).unwrap();
        let h = Tensor::row_vector(vec![0.3, -0.1, 0.2, 0.5, -0.4]);
        let (ctx, w) = m.attend(&h, &enc).unwrap();
        assert_eq!(w, vec![1.0]);
        for (a, b) in ctx.data().iter().zip(enc.annotations.row(0)) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn identical_annotations_get_uniform_attention() {
        let m = tiny();
        let mut enc = m.encode(&[5, 5, 5]).unwrap();
        let first = enc.annotations.row(0).to_vec();
        for r in 1..3 {
            enc.annotations.row_mut(r).copy_from_slice(&first);
        }
        let h = Tensor::row_vector(vec![0.3, -0.1, 0.2, 0.5, -0.4]);
        let (_, w) = m.attend(&h, &enc).unwrap();
        for x in w {
            assert!((x - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn bilinear_scores_follow_softmax() {
        // With W = I and annotations chosen so that h.a = [ln 3, ln 1], the
        // weights are [3/4, 1/4].
        let mut m = tiny();
        let w = m.layout.attn_score.weight;
        let ident = m.params.get_mut(w);
        for r in 0..5 {
            for c in 0..5 {
                ident.value.row_mut(r)[c] = if r == c { 1.0 } else { 0.0 };
            }
        }
        let mut enc = m.encode(&[5, 6]).unwrap();
        enc.annotations = Tensor::from_vec(
            2,
            5,
            vec![3f64.ln(), 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        )
        .unwrap();
        let h = Tensor::row_vector(vec![1.0, 0.0, 0.0, 0.0, 0.0]);
        let (_, w) = m.attend(&h, &enc).unwrap();
        assert!((w[0] - 0.75).abs() < 1e-12);
        assert!((w[1] - 0.25).abs() < 1e-12);
    }

    #[test]
    fn decode_step_is_a_distribution_over_outputs_and_inputs() {
        let m = tiny();
        let enc = m.encode(&[4, 5, 6, 7]).unwrap();
        let out = m
            .decode_step(&enc, &[&enc.initial_state, &enc.initial_state], &[Vocabulary::BOS, 4])
            .unwrap();
        assert_eq!(out.len(), 2);
        for o in &out {
            assert_eq!(o.log_probs.len(), m.output_vocab.len());
            let p: f64 = o.log_probs.iter().map(|l| l.exp()).sum();
            assert!((p - 1.0).abs() < 1e-9);
            assert_eq!(o.attention.len(), 4);
            assert!((o.attention.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn batched_and_single_decoding_agree() {
        let m = tiny();
        let enc = m.encode(&[4, 5, 6]).unwrap();
        let single = m.decode_step(&enc, &[&enc.initial_state], &[Vocabulary::BOS]).unwrap();
        let pair = m
            .decode_step(&enc, &[&enc.initial_state, &enc.initial_state], &[Vocabulary::BOS, Vocabulary::BOS])
            .unwrap();
        for (a, b) in single[0].log_probs.iter().zip(&pair[1].log_probs) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
