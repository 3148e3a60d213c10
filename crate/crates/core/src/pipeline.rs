//! Treebank-level training and prediction.

use crate::augment::{
    generate_autoencoder_examples, generate_lexicon_examples, mix, AugmentationPlan, CharDistribution,
};
use crate::codec::{build_vocabularies, encode_example, TrainingExample};
use crate::conllu::Treebank;
use crate::error::{Error, Result};
use crate::inference::{Lemmatizer, PredictStats};
use crate::lexicon::{FrequencyList, LexiconEntry};
use crate::model::{train, HyperParams, Seq2SeqModel, TrainingLog};

/// One gold example per token.
pub fn treebank_examples(tb: &Treebank) -> Result<Vec<TrainingExample>> {
    tb.require_lemmas()?;
    tb.tokens().map(encode_example).collect()
}

/// Train a fresh model on `train` plus auxiliary examples.
///
/// Vocabularies cover gold and auxiliary examples. The auxiliary lists are
/// shuffled in with the training data using the model seed; the batch size
/// follows the sentence count of `train`.
pub fn train_model(
    train_tb: &Treebank,
    dev: Option<&Treebank>,
    hyper: HyperParams,
    aux: &[Vec<TrainingExample>],
) -> Result<(Seq2SeqModel<f32>, TrainingLog)> {
    let gold = treebank_examples(train_tb)?;
    let plan = AugmentationPlan {
        seed: hyper.seed,
        ..AugmentationPlan::default()
    };
    let examples = mix(&gold, &plan, aux);
    let (iv, ov) = build_vocabularies(&examples, hyper.min_char_frequency);
    let dev_examples = match dev {
        Some(d) => treebank_examples(d)?,
        None => Vec::new(),
    };
    let mut model = Seq2SeqModel::new(hyper, iv, ov)?;
    let log = train(&mut model, &examples, &dev_examples, train_tb.sentences.len())?;
    Ok((model, log))
}

/// Copy of `input` with every LEMMA predicted by the model.
pub fn predict_treebank(model: &Seq2SeqModel<f32>, input: &Treebank) -> Result<(Treebank, PredictStats)> {
    let mut out = input.clone();
    let stats = Lemmatizer::new(model).lemmatize(&mut out)?;
    Ok((out, stats))
}

/// Auxiliary example lists called for by `plan`: autoencoder strings drawn
/// from the character distribution of `gold`, then lexicon examples.
pub fn auxiliary_examples(
    plan: &AugmentationPlan,
    gold: &[TrainingExample],
    train_tb: &Treebank,
    lexicon: Option<(&[LexiconEntry], &FrequencyList)>,
) -> Result<Vec<Vec<TrainingExample>>> {
    let mut aux = Vec::new();
    if plan.autoencoder > 0 {
        let dist = CharDistribution::from_examples(gold)?;
        aux.push(generate_autoencoder_examples(&dist, plan.autoencoder, plan.seed)?);
    }
    if plan.transducer > 0 {
        let (lex, freq) =
            lexicon.ok_or_else(|| Error::invalid("lexicon augmentation needs a lexicon and a frequency list"))?;
        aux.push(generate_lexicon_examples(lex, freq, train_tb, plan.transducer)?);
    }
    Ok(aux)
}
