//! Train on the synthetic agglutinative language and report accuracy on
//! seen word types and on held-out cells of seen paradigms.
//!
//! `cargo run --release --example synthetic_experiment -- [epochs]`
//! Thirty epochs at 64/128 take a few minutes on one core.

use std::time::Instant;

use ulem::baseline::{build_lookup, lemmatize_lookup};
use ulem::conllu::Treebank;
use ulem::model::HyperParams;
use ulem::pipeline::{predict_treebank, train_model};
use ulem::synthetic::{generate, SyntheticConfig};

fn split(pred: &Treebank, gold: &Treebank, held: &[bool]) -> [(usize, usize); 2] {
    let mut out = [(0, 0); 2];
    for ((p, g), &h) in pred.tokens().zip(gold.tokens()).zip(held) {
        let slot = &mut out[usize::from(h)];
        slot.0 += usize::from(p.lemma == g.lemma);
        slot.1 += 1;
    }
    out
}

fn main() -> ulem::Result<()> {
    let epochs = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(30);
    let corpus = generate(&SyntheticConfig::default())?;
    println!(
        "{} types, {} train / {} dev / {} test tokens",
        corpus.types.len(),
        corpus.train.token_count(),
        corpus.dev.token_count(),
        corpus.test.token_count()
    );
    for t in corpus.types.iter().filter(|t| t.stem == 0) {
        println!("  {:<12} {:<10} {} {}", t.form, t.lemma, t.xpos, t.feats);
    }

    let hyper = HyperParams {
        embedding_dim: 64,
        hidden_dim: 128,
        epochs,
        ..HyperParams::default()
    };
    let started = Instant::now();
    let (model, log) = train_model(&corpus.train, Some(&corpus.dev), hyper, &[])?;
    print!("{}", log.lines());
    println!("training took {:.0?}", started.elapsed());

    let (pred, stats) = predict_treebank(&model, &corpus.test)?;
    let [seen, held] = split(&pred, &corpus.test, &corpus.test_held_out);
    println!("seen      {}/{}", seen.0, seen.1);
    println!("held-out  {}/{}", held.0, held.1);
    println!("copies    {}", stats.copies);

    let lookup = build_lookup(&corpus.train)?;
    let mut looked = corpus.test.clone();
    lemmatize_lookup(&lookup, &mut looked);
    let [seen, held] = split(&looked, &corpus.test, &corpus.test_held_out);
    println!("look-up seen {}/{}, held-out {}/{}", seen.0, seen.1, held.0, held.1);
    Ok(())
}
