//! Build autoencoder and lexicon-derived training examples and mix them with
//! gold data.

use ulem::augment::{
    generate_autoencoder_examples, generate_lexicon_examples, mix, AugmentationPlan, CharDistribution,
};
use ulem::pipeline::treebank_examples;
use ulem::synthetic::{generate, SyntheticConfig};

fn main() -> ulem::Result<()> {
    let corpus = generate(&SyntheticConfig::default())?;
    let train = corpus.train_prefix(150, 8);
    let gold = treebank_examples(&train)?;

    let dist = CharDistribution::from_examples(&gold)?;
    println!("alphabet: {}", dist.alphabet().iter().collect::<String>());
    // Every alphabet character appears at least once, so n must cover it.
    let auto = generate_autoencoder_examples(&dist, 40, 7)?;
    for ex in auto.iter().take(5) {
        println!("autoencoder  {}", ex.tsv_line());
    }

    let lex = generate_lexicon_examples(&corpus.lexicon, &corpus.frequencies, &train, 40)?;
    for ex in lex.iter().take(5) {
        println!("lexicon      {}", ex.tsv_line());
    }

    let plan = AugmentationPlan::preset("mixed-2k", 7)?;
    let mixed = mix(&gold, &plan, &[auto, lex]);
    println!("{} gold + auxiliary = {} examples", gold.len(), mixed.len());
    Ok(())
}
