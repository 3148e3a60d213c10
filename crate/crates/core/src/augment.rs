//! Auxiliary training data: random-string autoencoder pairs and examples
//! mined from a morphological lexicon.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::io::Write;

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::codec::{chars_of, encode_parts, tag_symbols, Special, Symbol, TrainingExample, WeightGroup};
use crate::conllu::Treebank;
use crate::error::{Error, Result};
use crate::lexicon::{FrequencyList, LexiconEntry};

/// Shortest and longest autoencoder string.
pub const AUTOENC_LENGTHS: (usize, usize) = (3, 12);

/// Character probabilities estimated from counts.
#[derive(Clone, Debug, PartialEq)]
pub struct CharDistribution {
    chars: Vec<char>,
    probs: Vec<f64>,
}

impl CharDistribution {
    /// Characters with zero count are dropped.
    pub fn from_counts(counts: &BTreeMap<char, u64>) -> Result<Self> {
        let total: u64 = counts.values().sum();
        if total == 0 {
            return Err(Error::invalid("character distribution needs at least one character"));
        }
        let (chars, probs) = counts
            .iter()
            .filter(|(_, &n)| n > 0)
            .map(|(&c, &n)| (c, n as f64 / total as f64))
            .unzip();
        Ok(CharDistribution { chars, probs })
    }

    /// Counts over the input characters of `examples`.
    pub fn from_examples(examples: &[TrainingExample]) -> Result<Self> {
        let mut counts = BTreeMap::new();
        for s in examples.iter().flat_map(|e| &e.input) {
            if let Symbol::Char(c) = s {
                *counts.entry(*c).or_insert(0) += 1;
            }
        }
        Self::from_counts(&counts)
    }

    pub fn alphabet(&self) -> &[char] {
        &self.chars
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn probability(&self, c: char) -> f64 {
        self.chars.binary_search(&c).map_or(0.0, |i| self.probs[i])
    }
}

/// `n` random strings, each mapped onto itself behind an AUTOENC tag.
///
/// Lengths are uniform in 3..=12 and characters are drawn from `dist`. The
/// i-th of the first |alphabet| strings has the i-th alphabet character
/// placed at a random position, so every character occurs at least once.
pub fn generate_autoencoder_examples(dist: &CharDistribution, n: usize, seed: u64) -> Result<Vec<TrainingExample>> {
    if n == 0 {
        return Ok(Vec::new());
    }
    let alphabet = dist.alphabet();
    if n < alphabet.len() {
        return Err(Error::Coverage {
            requested: n,
            alphabet: alphabet.len(),
        });
    }
    let pick = WeightedIndex::new(dist.probabilities()).map_err(|e| Error::invalid(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = AUTOENC_LENGTHS;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let len = rng.gen_range(lo..=hi);
        let mut s: Vec<char> = (0..len).map(|_| alphabet[pick.sample(&mut rng)]).collect();
        if let Some(&forced) = alphabet.get(i) {
            let at = rng.gen_range(0..len);
            s[at] = forced;
        }
        let text: String = s.into_iter().collect();
        let mut input: Vec<Symbol> = chars_of(&text).collect();
        input.push(Symbol::Special(Special::Autoenc));
        let output = chars_of(&text).chain([Symbol::Special(Special::Eos)]).collect();
        out.push(TrainingExample {
            input,
            output,
            group: WeightGroup::Autoencoder,
        });
    }
    Ok(out)
}

type Analysis<'a> = (Option<&'a str>, Option<&'a str>, String);

/// Examples for the `n` most frequent lexicon forms that survive filtering.
///
/// Filters, in order: forms seen in `train`; entries without UPOS; forms
/// with two or more lemmas under identical tags. Surviving forms are ranked
/// by frequency, ties by form, and each of the top `n` contributes one
/// example per distinct (tags, lemma).
pub fn generate_lexicon_examples(
    lex: &[LexiconEntry],
    freq: &FrequencyList,
    train: &Treebank,
    n: usize,
) -> Result<Vec<TrainingExample>> {
    if lex.is_empty() {
        log::warn!("lexicon is empty; no lexicon examples generated");
        return Ok(Vec::new());
    }
    let seen: HashSet<&str> = train.tokens().map(|t| t.form.as_str()).collect();
    let mut by_form: BTreeMap<&str, BTreeMap<(Analysis<'_>, &str), &LexiconEntry>> = BTreeMap::new();
    for e in lex {
        if seen.contains(e.form.as_str()) || e.upos.is_none() {
            continue;
        }
        let tags = (e.upos.as_deref(), e.xpos.as_deref(), e.feats.canonical());
        by_form.entry(&e.form).or_default().entry((tags, &e.lemma)).or_insert(e);
    }
    by_form.retain(|_, analyses| {
        let distinct_tags: BTreeSet<&Analysis<'_>> = analyses.keys().map(|(t, _)| t).collect();
        distinct_tags.len() == analyses.len()
    });
    let mut ranked: Vec<(&str, u64)> = by_form.keys().map(|f| (*f, freq.count(f))).collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));

    let mut out = Vec::new();
    for (form, _) in ranked.into_iter().take(n) {
        for e in by_form[form].values() {
            let tags = tag_symbols(e.upos.as_deref(), e.xpos.as_deref(), &e.feats);
            out.push(encode_parts(form, Some(&e.lemma), tags, WeightGroup::Transducer)?);
        }
    }
    Ok(out)
}

/// How many auxiliary examples of each kind to add.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct AugmentationPlan {
    pub autoencoder: usize,
    pub transducer: usize,
    pub seed: u64,
}

impl AugmentationPlan {
    /// Named presets: `none`, `autoenc`, `lexicon` (4,000 each) and
    /// `mixed-2k`, `mixed-4k`, `mixed-8k` (that many of both).
    pub fn preset(name: &str, seed: u64) -> Result<Self> {
        let (autoencoder, transducer) = match name {
            "none" => (0, 0),
            "autoenc" => (4000, 0),
            "lexicon" => (0, 4000),
            "mixed-2k" => (2000, 2000),
            "mixed-4k" => (4000, 4000),
            "mixed-8k" => (8000, 8000),
            _ => return Err(Error::invalid(format!("unknown augmentation preset {name:?}"))),
        };
        Ok(AugmentationPlan {
            autoencoder,
            transducer,
            seed,
        })
    }

    pub fn is_empty(&self) -> bool {
        self.autoencoder == 0 && self.transducer == 0
    }
}

/// Concatenate and shuffle with the plan's seed.
pub fn mix(gold: &[TrainingExample], plan: &AugmentationPlan, aux: &[Vec<TrainingExample>]) -> Vec<TrainingExample> {
    let mut all: Vec<TrainingExample> = gold.iter().chain(aux.iter().flatten()).cloned().collect();
    all.shuffle(&mut ChaCha8Rng::seed_from_u64(plan.seed));
    all
}

/// One line per example: input symbols, output characters, weight group.
pub fn write_examples_tsv<W: Write>(examples: &[TrainingExample], mut w: W) -> Result<()> {
    for e in examples {
        writeln!(w, "{}", e.tsv_line())?;
    }
    w.flush()?;
    Ok(())
}
