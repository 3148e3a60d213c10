//! External morphological lexicons and word-frequency lists.
//!
//! Lexicon rows are `form<TAB>lemma<TAB>upos<TAB>xpos<TAB>feats` with `_`
//! for absent values; frequency lists are `form<TAB>count`.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::conllu::{Features, Treebank, ABSENT};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LexiconEntry {
    pub form: String,
    pub lemma: String,
    pub upos: Option<String>,
    pub xpos: Option<String>,
    pub feats: Features,
}

impl LexiconEntry {
    pub fn tsv_line(&self) -> String {
        let col = |c: &Option<String>| c.clone().unwrap_or_else(|| ABSENT.to_owned());
        format!(
            "{}\t{}\t{}\t{}\t{}",
            self.form,
            self.lemma,
            col(&self.upos),
            col(&self.xpos),
            self.feats
        )
    }
}

fn opt(col: &str) -> Option<String> {
    (col != ABSENT).then(|| col.to_owned())
}

/// Parse a lexicon; identical rows are collapsed, first occurrence order kept.
pub fn load_lexicon<R: BufRead>(r: R, source_name: &str) -> Result<Vec<LexiconEntry>> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 5 {
            return Err(Error::parse(
                source_name,
                i + 1,
                format!("expected 5 tab-separated columns, found {}", cols.len()),
            ));
        }
        if cols[0].is_empty() || cols[1].is_empty() {
            return Err(Error::parse(source_name, i + 1, "empty form or lemma"));
        }
        let feats = Features::parse(cols[4]).map_err(|e| Error::parse(source_name, i + 1, e.to_string()))?;
        let entry = LexiconEntry {
            form: cols[0].to_owned(),
            lemma: cols[1].to_owned(),
            upos: opt(cols[2]),
            xpos: opt(cols[3]),
            feats,
        };
        if seen.insert(entry.clone()) {
            out.push(entry);
        }
    }
    Ok(out)
}

pub fn load_lexicon_file(path: impl AsRef<Path>) -> Result<Vec<LexiconEntry>> {
    let path = path.as_ref();
    load_lexicon(BufReader::new(File::open(path)?), &path.display().to_string())
}

/// Form counts, iterated by count descending then form.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FrequencyList {
    counts: HashMap<String, u64>,
}

impl FrequencyList {
    /// Repeated forms have their counts summed.
    pub fn from_counts<I: IntoIterator<Item = (String, u64)>>(pairs: I) -> Result<Self> {
        let mut counts = HashMap::new();
        for (form, c) in pairs {
            if c == 0 {
                return Err(Error::invalid(format!("count for {form:?} must be at least 1")));
            }
            *counts.entry(form).or_insert(0) += c;
        }
        Ok(FrequencyList { counts })
    }

    pub fn load<R: BufRead>(r: R, source_name: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for (i, line) in r.lines().enumerate() {
            let line = line?;
            if line.is_empty() {
                continue;
            }
            let (form, count) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse(source_name, i + 1, "expected form<TAB>count"))?;
            let count: u64 = count
                .trim()
                .parse()
                .map_err(|_| Error::parse(source_name, i + 1, format!("bad count {count:?}")))?;
            if count == 0 {
                return Err(Error::parse(source_name, i + 1, "count must be at least 1"));
            }
            pairs.push((form.to_owned(), count));
        }
        Self::from_counts(pairs)
    }

    pub fn load_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::load(BufReader::new(File::open(path)?), &path.display().to_string())
    }

    /// Zero for unlisted forms.
    pub fn count(&self, form: &str) -> u64 {
        self.counts.get(form).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> {
        let mut v: Vec<(&str, u64)> = self.counts.iter().map(|(f, c)| (f.as_str(), *c)).collect();
        v.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        v.into_iter()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoverageReport {
    pub tokens: usize,
    pub covered: usize,
    pub recalled: usize,
}

impl CoverageReport {
    pub fn coverage(&self) -> f64 {
        ratio(self.covered, self.tokens)
    }

    pub fn recall(&self) -> f64 {
        ratio(self.recalled, self.tokens)
    }
}

fn ratio(a: usize, b: usize) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

/// Token-level share of test forms the lexicon knows, and share whose gold
/// lemma is among the lexicon's lemmas for that form (tags ignored).
pub fn coverage_and_recall(lex: &[LexiconEntry], test: &Treebank) -> Result<CoverageReport> {
    test.require_lemmas()?;
    let mut lemmas: HashMap<&str, BTreeSet<&str>> = HashMap::new();
    for e in lex {
        lemmas.entry(&e.form).or_default().insert(&e.lemma);
    }
    let mut r = CoverageReport {
        tokens: 0,
        covered: 0,
        recalled: 0,
    };
    for t in test.tokens() {
        r.tokens += 1;
        if let Some(ls) = lemmas.get(t.form.as_str()) {
            r.covered += 1;
            if ls.contains(t.lemma.as_deref().expect("checked above")) {
                r.recalled += 1;
            }
        }
    }
    Ok(r)
}
