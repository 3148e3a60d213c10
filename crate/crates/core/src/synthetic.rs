//! A deterministic toy inflectional language for end-to-end experiments.
//!
//! Stems take one of eight paradigms (four nominal, four verbal), each with
//! six inflected cells. A stem-final consonant alternates before a front
//! vowel (k→č, g→ž, t→c, d→z, s→š, r→ř), in forms and lemmas alike. The XPOS
//! column names the paradigm. Every stem has two cells held out of all
//! training data; they show up only in the test set and the lexicon.

use std::collections::{BTreeSet, HashSet};

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::conllu::{Features, Sentence, Token, Treebank};
use crate::error::Result;
use crate::lexicon::{FrequencyList, LexiconEntry};

pub const CELLS: usize = 6;

struct Paradigm {
    upos: &'static str,
    citation: &'static str,
    suffixes: [&'static str; CELLS],
}

const PARADIGMS: [Paradigm; 8] = [
    Paradigm { upos: "NOUN", citation: "a", suffixes: ["a", "y", "e", "y", "", "ám"] },
    Paradigm { upos: "NOUN", citation: "o", suffixes: ["o", "a", "u", "a", "", "ům"] },
    Paradigm { upos: "NOUN", citation: "", suffixes: ["", "u", "i", "y", "ů", "ům"] },
    Paradigm { upos: "NOUN", citation: "e", suffixes: ["e", "ete", "eti", "ata", "at", "atům"] },
    Paradigm { upos: "VERB", citation: "at", suffixes: ["ám", "áš", "á", "áme", "áte", "ají"] },
    Paradigm { upos: "VERB", citation: "it", suffixes: ["ím", "íš", "í", "íme", "íte", "ejí"] },
    Paradigm { upos: "VERB", citation: "ovat", suffixes: ["uji", "uješ", "uje", "ujeme", "ujete", "ujou"] },
    Paradigm { upos: "VERB", citation: "nout", suffixes: ["nu", "neš", "ne", "neme", "nete", "nou"] },
];

const NOUN_CELLS: [(&str, &str); CELLS] = [
    ("Nom", "Sing"),
    ("Gen", "Sing"),
    ("Dat", "Sing"),
    ("Nom", "Plur"),
    ("Gen", "Plur"),
    ("Dat", "Plur"),
];

const VERB_CELLS: [(&str, &str); CELLS] = [
    ("1", "Sing"),
    ("2", "Sing"),
    ("3", "Sing"),
    ("1", "Plur"),
    ("2", "Plur"),
    ("3", "Plur"),
];

pub fn paradigm_count() -> usize {
    PARADIGMS.len()
}

fn alternate(c: char) -> Option<char> {
    Some(match c {
        'k' => 'č',
        'g' => 'ž',
        't' => 'c',
        'd' => 'z',
        's' => 'š',
        'r' => 'ř',
        _ => return None,
    })
}

fn is_front(c: char) -> bool {
    matches!(c, 'i' | 'í' | 'e' | 'é' | 'ě')
}

/// Attach a suffix, applying the stem-final alternation before a front
/// vowel.
pub fn realize(stem: &str, suffix: &str) -> String {
    let mut out = stem.to_owned();
    if suffix.chars().next().is_some_and(is_front) {
        if let Some(alt) = out.chars().last().and_then(alternate) {
            out.pop();
            out.push(alt);
        }
    }
    out.push_str(suffix);
    out
}

/// One (stem, cell) pairing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WordType {
    pub stem: usize,
    pub cell: usize,
    pub form: String,
    pub lemma: String,
    pub upos: String,
    pub xpos: String,
    pub feats: Features,
    pub held_out: bool,
}

impl WordType {
    pub fn token(&self, id: usize) -> Token {
        Token::new(id, &self.form)
            .with_lemma(&self.lemma)
            .with_upos(&self.upos)
            .with_xpos(&self.xpos)
            .with_feats(self.feats.clone())
    }

    pub fn lexicon_entry(&self) -> LexiconEntry {
        LexiconEntry {
            form: self.form.clone(),
            lemma: self.lemma.clone(),
            upos: Some(self.upos.clone()),
            xpos: Some(self.xpos.clone()),
            feats: self.feats.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SyntheticConfig {
    pub stems: usize,
    /// Stems that appear only in the lexicon.
    pub lexicon_only_stems: usize,
    pub train_tokens: usize,
    pub dev_tokens: usize,
    pub test_tokens: usize,
    pub sentence_len: usize,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            stems: 40,
            lexicon_only_stems: 60,
            train_tokens: 2000,
            dev_tokens: 200,
            test_tokens: 500,
            sentence_len: 8,
            seed: 1,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SyntheticCorpus {
    /// Types of the corpus stems, `stems * CELLS` of them.
    pub types: Vec<WordType>,
    pub train: Treebank,
    pub dev: Treebank,
    pub test: Treebank,
    /// Per test token in reading order: whether it is a held-out type whose
    /// form never occurs in training.
    pub test_held_out: Vec<bool>,
    /// Full paradigm tables of corpus and lexicon-only stems.
    pub lexicon: Vec<LexiconEntry>,
    pub frequencies: FrequencyList,
}

impl SyntheticCorpus {
    /// The first `n` training tokens as a treebank of their own.
    pub fn train_prefix(&self, n: usize, sentence_len: usize) -> Treebank {
        let toks: Vec<Token> = self.train.tokens().take(n).cloned().collect();
        into_sentences(&self.train.name, toks, sentence_len)
    }
}

fn make_stems(n: usize, rng: &mut ChaCha8Rng) -> Vec<String> {
    const ONSETS: &[char] = &['b', 'd', 'g', 'k', 'l', 'm', 'n', 'p', 'r', 's', 't', 'v'];
    const VOWELS: &[char] = &['a', 'o', 'u', 'e', 'i'];
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let syllables = rng.gen_range(1..=2);
        let mut s = String::new();
        for _ in 0..syllables {
            s.push(*ONSETS.choose(rng).expect("non-empty"));
            s.push(*VOWELS.choose(rng).expect("non-empty"));
        }
        s.push(*ONSETS.choose(rng).expect("non-empty"));
        if seen.insert(s.clone()) {
            out.push(s);
        }
    }
    out
}

fn word_type(stem_index: usize, stem: &str, cell: usize, held_out: bool) -> WordType {
    let p_index = stem_index % PARADIGMS.len();
    let p = &PARADIGMS[p_index];
    let feats = if p.upos == "NOUN" {
        let (case, number) = NOUN_CELLS[cell];
        Features::from_pairs([("Case", case), ("Number", number)])
    } else {
        let (person, number) = VERB_CELLS[cell];
        Features::from_pairs([("Number", number), ("Person", person), ("Tense", "Pres")])
    }
    .expect("distinct categories");
    WordType {
        stem: stem_index,
        cell,
        form: realize(stem, p.suffixes[cell]),
        lemma: realize(stem, p.citation),
        upos: p.upos.to_owned(),
        xpos: format!("P{p_index}"),
        feats,
        held_out,
    }
}

fn into_sentences(name: &str, tokens: Vec<Token>, len: usize) -> Treebank {
    let sentences = tokens.chunks(len.max(1)).map(|c| Sentence::from_tokens(c.to_vec())).collect();
    Treebank::new(name, sentences)
}

/// Zipf weights over a seeded permutation of `n` items.
fn zipf(n: usize, rng: &mut ChaCha8Rng) -> WeightedIndex<f64> {
    let mut ranks: Vec<usize> = (0..n).collect();
    ranks.shuffle(rng);
    WeightedIndex::new(ranks.iter().map(|&r| 1.0 / (r + 1) as f64)).expect("positive weights")
}

pub fn generate(cfg: &SyntheticConfig) -> Result<SyntheticCorpus> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let stems = make_stems(cfg.stems + cfg.lexicon_only_stems, &mut rng);
    let per_paradigm = PARADIGMS.len();

    let mut types = Vec::with_capacity(cfg.stems * CELLS);
    for (i, stem) in stems.iter().take(cfg.stems).enumerate() {
        // Rotating the held-out pair keeps every cell of every paradigm in
        // training for most of its stems.
        let k = i / per_paradigm;
        let held = [k % CELLS, (k + CELLS / 2) % CELLS];
        for cell in 0..CELLS {
            types.push(word_type(i, stem, cell, held.contains(&cell)));
        }
    }
    let seen: Vec<&WordType> = types.iter().filter(|t| !t.held_out).collect();
    // Syncretic cells can give a held-out type the surface form of a seen
    // one; only forms absent from training count as held out in the test.
    let seen_forms: HashSet<&str> = seen.iter().map(|t| t.form.as_str()).collect();
    let unseen: Vec<&WordType> = types
        .iter()
        .filter(|t| t.held_out && !seen_forms.contains(t.form.as_str()))
        .collect();

    // Every seen type once, then Zipf draws.
    let weights = zipf(seen.len(), &mut rng);
    let mut train: Vec<Token> = seen.iter().map(|t| t.token(0)).collect();
    while train.len() < cfg.train_tokens {
        train.push(seen[weights.sample(&mut rng)].token(0));
    }
    train.shuffle(&mut rng);
    train.truncate(cfg.train_tokens);

    let dev: Vec<Token> = (0..cfg.dev_tokens).map(|_| seen[weights.sample(&mut rng)].token(0)).collect();

    let mut test: Vec<(Token, bool)> = (0..cfg.test_tokens)
        .map(|i| {
            let pool = if i % 2 == 0 { &seen } else { &unseen };
            let t = pool[rng.gen_range(0..pool.len())];
            (t.token(0), t.held_out)
        })
        .collect();
    test.shuffle(&mut rng);
    let test_held_out = test.iter().map(|(_, h)| *h).collect();
    let test: Vec<Token> = test.into_iter().map(|(t, _)| t).collect();

    let mut lexicon: Vec<LexiconEntry> = types.iter().map(WordType::lexicon_entry).collect();
    for (i, stem) in stems.iter().enumerate().skip(cfg.stems) {
        lexicon.extend((0..CELLS).map(|cell| word_type(i, stem, cell, false).lexicon_entry()));
    }
    let forms: Vec<String> = lexicon
        .iter()
        .map(|e| e.form.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut ranks: Vec<usize> = (0..forms.len()).collect();
    ranks.shuffle(&mut rng);
    let frequencies = FrequencyList::from_counts(
        forms
            .into_iter()
            .zip(ranks)
            .map(|(f, r)| (f, 100_000 / (r as u64 + 1) + 1)),
    )?;

    Ok(SyntheticCorpus {
        types,
        train: into_sentences("synthetic-train", train, cfg.sentence_len),
        dev: into_sentences("synthetic-dev", dev, cfg.sentence_len),
        test: into_sentences("synthetic-test", test, cfg.sentence_len),
        test_held_out,
        lexicon,
        frequencies,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn alternation_before_front_vowels() {
        assert_eq!(realize("vlak", "e"), "vlače");
        assert_eq!(realize("vlak", "a"), "vlaka");
        assert_eq!(realize("dum", "i"), "dumi");
        assert_eq!(realize("pes", "ím"), "peším");
        assert_eq!(realize("rod", ""), "rod");
    }

    #[test]
    fn corpus_shape() {
        let c = generate(&SyntheticConfig::default()).unwrap();
        assert_eq!(c.types.len(), 240);
        assert_eq!(c.types.iter().filter(|t| t.held_out).count(), 80);
        assert_eq!(c.train.token_count(), 2000);
        assert_eq!(c.train.sentences.len(), 250);
        assert_eq!(c.test.token_count(), 500);
        assert_eq!(c.test_held_out.iter().filter(|&&h| h).count(), 250);
        assert_eq!(c.lexicon.len(), 600);

        let train_forms: HashSet<(&str, String)> = c.train.tokens().map(|t| (t.form.as_str(), t.tag_string())).collect();
        let seen = c.types.iter().filter(|t| !t.held_out).count();
        assert_eq!(train_forms.len(), seen);
        let surface: HashSet<&str> = c.train.tokens().map(|t| t.form.as_str()).collect();
        for (t, held) in c.test.tokens().zip(&c.test_held_out) {
            assert_eq!(train_forms.contains(&(t.form.as_str(), t.tag_string())), !held);
            if *held {
                assert!(!surface.contains(t.form.as_str()), "{}", t.form);
            }
        }
    }

    #[test]
    fn deterministic() {
        let a = generate(&SyntheticConfig::default()).unwrap();
        let b = generate(&SyntheticConfig::default()).unwrap();
        assert_eq!(a.train, b.train);
        assert_eq!(a.test, b.test);
        assert_eq!(a.frequencies, b.frequencies);
    }
}
