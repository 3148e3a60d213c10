//! How much of a test set a morphological lexicon covers, and how often its
//! analyses contain the gold lemma.

use ulem::lexicon::{coverage_and_recall, load_lexicon};
use ulem::synthetic::{generate, SyntheticConfig};

fn main() -> ulem::Result<()> {
    let corpus = generate(&SyntheticConfig::default())?;
    let r = coverage_and_recall(&corpus.lexicon, &corpus.test)?;
    println!("synthetic  tokens={} coverage={:.4} recall={:.4}", r.tokens, r.coverage(), r.recall());

    // A lexicon that knows half the paradigms.
    let half: Vec<_> = corpus
        .lexicon
        .iter()
        .filter(|e| e.xpos.as_deref().is_some_and(|x| x < "P4"))
        .cloned()
        .collect();
    let r = coverage_and_recall(&half, &corpus.test)?;
    println!("half       tokens={} coverage={:.4} recall={:.4}", r.tokens, r.coverage(), r.recall());

    // The file format: form, lemma, UPOS, XPOS, FEATS.
    let tsv = "hands\thand\tNOUN\t_\tNumber=Plur\nhands\thand\tVERB\t_\tPerson=3\n";
    let parsed = load_lexicon(tsv.as_bytes(), "inline")?;
    println!("parsed {} entries", parsed.len());
    Ok(())
}
