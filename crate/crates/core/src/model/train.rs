use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{HyperParams, Seq2SeqModel};
use crate::codec::{Symbol, TrainingExample};
use crate::error::{Error, Result};
use crate::inference::predict_symbols;
use crate::nn::{Adam, Graph};

/// An example mapped to vocabulary ids.
#[derive(Clone, Debug)]
pub struct PreparedExample {
    pub input: Vec<u32>,
    /// Output ids ending with EOS.
    pub output: Vec<u32>,
    pub symbols: Vec<Symbol>,
    pub target: String,
}

impl PreparedExample {
    pub fn new<T: crate::nn::Scalar>(model: &Seq2SeqModel<T>, ex: &TrainingExample) -> Self {
        PreparedExample {
            input: model.input_ids(ex),
            output: model.output_ids(ex),
            symbols: ex.input.clone(),
            target: ex.target(),
        }
    }
}

/// Minibatch size by number of training sentences: 64, or 32 below 2,000
/// sentences, or 6 below 200.
pub fn batch_size_for(training_sentences: usize) -> usize {
    match training_sentences {
        n if n < 200 => 6,
        n if n < 2000 => 32,
        _ => 64,
    }
}

/// Learning rate for a 1-based epoch: constant through `decay_start_epoch`,
/// then multiplied by `lr_decay` once per epoch.
pub fn learning_rate(h: &HyperParams, epoch: usize) -> f64 {
    let decays = epoch.saturating_sub(h.decay_start_epoch);
    h.lr * h.lr_decay.powi(decays as i32)
}

#[derive(Clone, Debug, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    pub lr: f64,
    /// Mean teacher-forced loss per target symbol.
    pub train_loss: f64,
    pub dev_accuracy: Option<f64>,
}

impl EpochRecord {
    pub fn log_line(&self) -> String {
        let dev = self
            .dev_accuracy
            .map_or_else(|| "na".to_owned(), |a| format!("{a:.6}"));
        format!(
            "epoch={} lr={:e} loss={:.9} dev_accuracy={}",
            self.epoch, self.lr, self.train_loss, dev
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainingLog {
    pub batch_size: usize,
    pub epochs: Vec<EpochRecord>,
    /// Epoch whose parameters the model holds after training.
    pub best_epoch: usize,
}

impl TrainingLog {
    pub fn lines(&self) -> String {
        let mut out = format!("batch_size={}\n", self.batch_size);
        for e in &self.epochs {
            out.push_str(&e.log_line());
            out.push('\n');
        }
        out.push_str(&format!("best_epoch={}\n", self.best_epoch));
        out
    }
}

/// Exact-match accuracy of beam decoding over prepared examples; identical
/// inputs are decoded once.
pub(crate) fn dev_accuracy(model: &Seq2SeqModel<f32>, dev: &[PreparedExample]) -> Result<f64> {
    let mut cache: HashMap<&[u32], String> = HashMap::new();
    let mut correct = 0;
    for ex in dev {
        if !cache.contains_key(ex.input.as_slice()) {
            let p = predict_symbols(model, &ex.symbols, model.hyper.beam_size)?;
            cache.insert(&ex.input, p.lemma);
        }
        if cache[ex.input.as_slice()] == ex.target {
            correct += 1;
        }
    }
    Ok(correct as f64 / dev.len() as f64)
}

/// Train with teacher forcing and Adam, keeping the parameters of the epoch
/// with the best dev accuracy (earliest on ties). Without dev examples the
/// final epoch is kept.
pub fn train(
    model: &mut Seq2SeqModel<f32>,
    examples: &[TrainingExample],
    dev: &[TrainingExample],
    training_sentences: usize,
) -> Result<TrainingLog> {
    if examples.is_empty() {
        return Err(Error::invalid("no training examples"));
    }
    if examples.iter().any(|e| e.output.is_empty()) {
        return Err(Error::invalid("training example without a lemma"));
    }
    if dev.is_empty() {
        log::warn!("no dev examples; keeping the final epoch");
    }
    let hyper = model.hyper.clone();
    let batch_size = hyper.batch_size.unwrap_or_else(|| batch_size_for(training_sentences));
    let prepared: Vec<PreparedExample> = examples.iter().map(|e| PreparedExample::new(model, e)).collect();
    let dev: Vec<PreparedExample> = dev.iter().map(|e| PreparedExample::new(model, e)).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(hyper.seed ^ 0x7472_6169_6e00);
    let mut order: Vec<usize> = (0..prepared.len()).collect();
    let mut log = TrainingLog {
        batch_size,
        epochs: Vec::with_capacity(hyper.epochs),
        best_epoch: 0,
    };
    let mut best: Option<(f64, Vec<crate::nn::Tensor<f32>>)> = None;

    for epoch in 1..=hyper.epochs {
        let adam = Adam::new(learning_rate(&hyper, epoch));
        order.shuffle(&mut rng);
        let mut loss_sum = 0.0f64;
        let mut symbols = 0usize;
        for chunk in order.chunks(batch_size) {
            let batch: Vec<&PreparedExample> = chunk.iter().map(|&i| &prepared[i]).collect();
            let dropout_rng = ChaCha8Rng::seed_from_u64(rng.gen());
            let grads = {
                let mut g = Graph::training(&model.params, dropout_rng);
                let (loss, count) = model.batch_loss(&mut g, &batch)?;
                loss_sum += f64::from(g.value(loss).item());
                symbols += count;
                let mean = g.scale(loss, 1.0 / count as f32);
                g.backward(mean)?
            };
            model.params.accumulate(grads);
            model.params.clip_grad_norm(hyper.clip_norm as f32);
            adam.step(&mut model.params);
        }

        let dev_acc = if dev.is_empty() {
            None
        } else {
            Some(dev_accuracy(model, &dev)?)
        };
        let record = EpochRecord {
            epoch,
            lr: adam.lr,
            train_loss: loss_sum / symbols as f64,
            dev_accuracy: dev_acc,
        };
        log::info!("{}", record.log_line());
        log.epochs.push(record);

        match dev_acc {
            Some(acc) if best.as_ref().is_none_or(|(b, _)| acc > *b) => {
                best = Some((acc, model.params.snapshot()));
                log.best_epoch = epoch;
            }
            None => log.best_epoch = epoch,
            _ => {}
        }
    }
    if let Some((_, values)) = best {
        model.params.restore(values);
    }
    Ok(log)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn batch_sizes_follow_sentence_counts() {
        assert_eq!(batch_size_for(150), 6);
        assert_eq!(batch_size_for(199), 6);
        assert_eq!(batch_size_for(200), 32);
        assert_eq!(batch_size_for(1999), 32);
        assert_eq!(batch_size_for(2000), 64);
    }

    #[test]
    fn learning_rate_decays_after_start_epoch() {
        let h = HyperParams::default();
        assert_eq!(learning_rate(&h, 1), 0.0005);
        assert_eq!(learning_rate(&h, 20), 0.0005);
        assert!((learning_rate(&h, 21) - 0.0005 * 0.9).abs() < 1e-15);
        assert!((learning_rate(&h, 22) - 0.0005 * 0.81).abs() < 1e-15);
    }
}
