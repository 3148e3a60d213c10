//! Build a lemma cache from training data and consult it before decoding.

use ulem::cache::LemmaCache;
use ulem::inference::Lemmatizer;
use ulem::model::HyperParams;
use ulem::pipeline::train_model;
use ulem::synthetic::{generate, SyntheticConfig};

fn main() -> ulem::Result<()> {
    let corpus = generate(&SyntheticConfig::default())?;
    let cache = LemmaCache::build(&corpus.train, false)?;
    println!("cache entries: {}", cache.len());

    let mut tsv = Vec::new();
    cache.save(&mut tsv)?;
    let text = String::from_utf8_lossy(&tsv);
    for line in text.lines().take(3) {
        println!("  {line}");
    }

    // A barely trained model is enough to show the split between cache hits
    // and decodes.
    let hyper = HyperParams {
        embedding_dim: 8,
        hidden_dim: 16,
        epochs: 1,
        ..HyperParams::default()
    };
    let (model, _) = train_model(&corpus.train_prefix(64, 8), None, hyper, &[])?;
    let lemmatizer = Lemmatizer::new(&model).with_cache(&cache).with_workers(2);
    let mut test = corpus.test.clone();
    let stats = lemmatizer.lemmatize(&mut test)?;
    println!(
        "tokens={} cache_hits={} decodes={}",
        stats.tokens,
        stats.cache_hits,
        lemmatizer.decode_count()
    );
    Ok(())
}
