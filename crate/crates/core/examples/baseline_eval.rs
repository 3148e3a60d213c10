//! Score the look-up baseline and a small trained model on the synthetic
//! test set.
//!
//! `cargo run --release --example baseline_eval -- [epochs]`

use ulem::baseline::{build_lookup, lemmatize_lookup};
use ulem::eval::{evaluate, macro_average, relative_error_reduction, write_eval_csv};
use ulem::model::HyperParams;
use ulem::pipeline::{predict_treebank, train_model};
use ulem::synthetic::{generate, SyntheticConfig};

fn main() -> ulem::Result<()> {
    let epochs = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(8);
    let corpus = generate(&SyntheticConfig::default())?;

    let lookup = build_lookup(&corpus.train)?;
    let mut looked = corpus.test.clone();
    lemmatize_lookup(&lookup, &mut looked);
    let mut base = evaluate(&looked, &corpus.test)?;
    base.treebank = "lookup".into();

    let hyper = HyperParams {
        embedding_dim: 32,
        hidden_dim: 64,
        epochs,
        init_range: 0.3,
        ..HyperParams::default()
    };
    let (model, log) = train_model(&corpus.train, Some(&corpus.dev), hyper, &[])?;
    eprint!("{}", log.lines());
    let (pred, _) = predict_treebank(&model, &corpus.test)?;
    let mut ours = evaluate(&pred, &corpus.test)?;
    ours.treebank = "seq2seq".into();

    let summary = macro_average("both", &[base.clone(), ours.clone()])?;
    write_eval_csv(&[base.clone(), ours.clone()], &[summary], std::io::stdout())?;
    if let Some(r) = relative_error_reduction(base.error_rate(), ours.error_rate()) {
        println!("relative error reduction {:.1}%", 100.0 * r);
    }
    Ok(())
}
