//! Train the encoder-decoder on a copy task and decode a few unseen strings.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ulem::codec::{build_vocabularies, encode_example, TrainingExample};
use ulem::conllu::Token;
use ulem::inference::{lemmatize_token, predict_symbols};
use ulem::model::{train, HyperParams, Seq2SeqModel};

fn strings(n: usize, seed: u64) -> Vec<TrainingExample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let s: String = (0..rng.gen_range(1..=6)).map(|_| rng.gen_range('a'..='h')).collect();
            encode_example(&Token::new(i + 1, s.as_str()).with_lemma(s.as_str()).with_upos("X")).unwrap()
        })
        .collect()
}

fn main() -> ulem::Result<()> {
    let train_set = strings(200, 1);
    let dev = strings(100, 2);
    let (iv, ov) = build_vocabularies(&train_set, 1);
    let hyper = HyperParams {
        embedding_dim: 32,
        hidden_dim: 64,
        epochs: 20,
        dropout: 0.0,
        lr: 0.002,
        batch_size: Some(8),
        init_range: 0.3,
        ..HyperParams::default()
    };
    let mut model = Seq2SeqModel::<f32>::new(hyper, iv, ov)?;
    let log = train(&mut model, &train_set, &dev, 0)?;
    print!("{}", log.lines());

    let correct = dev
        .iter()
        .filter(|ex| predict_symbols(&model, &ex.input, 5).map(|p| p.lemma == ex.target()).unwrap_or(false))
        .count();
    println!("dev exact match {correct}/{}", dev.len());
    for form in ["abc", "hgfe", "dd"] {
        let p = lemmatize_token(&model, &Token::new(1, form).with_upos("X"))?;
        println!("{form} -> {} ({:.3})", p.lemma, p.score);
    }
    Ok(())
}
