//! Exact-match lemma cache keyed on form and tags.

use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::conllu::{Token, Treebank};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CacheKey {
    pub form: String,
    pub upos: String,
    pub xpos: String,
    pub feats: String,
}

impl CacheKey {
    pub fn of(t: &Token) -> Self {
        let col = |c: &Option<String>| c.clone().unwrap_or_else(|| "_".to_owned());
        CacheKey {
            form: t.form.clone(),
            upos: col(&t.upos),
            xpos: col(&t.xpos),
            feats: t.feats.to_string(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LemmaCache {
    entries: BTreeMap<CacheKey, String>,
}

/// Most frequent lemma, lexicographically smallest on ties.
pub(crate) fn modal_lemma(counts: &HashMap<String, usize>) -> Option<&str> {
    counts
        .iter()
        .max_by(|(la, ca), (lb, cb)| ca.cmp(cb).then_with(|| lb.cmp(la)))
        .map(|(l, _)| l.as_str())
}

impl LemmaCache {
    /// Modal lemma per key over the gold lemmas of `train`. With
    /// `skip_ambiguous`, keys seen with two or more lemmas are left out.
    pub fn build(train: &Treebank, skip_ambiguous: bool) -> Result<Self> {
        train.require_lemmas()?;
        let mut counts: HashMap<CacheKey, HashMap<String, usize>> = HashMap::new();
        for t in train.tokens() {
            let lemma = t.lemma.clone().expect("checked above");
            *counts.entry(CacheKey::of(t)).or_default().entry(lemma).or_default() += 1;
        }
        let entries = counts
            .into_iter()
            .filter(|(_, c)| !(skip_ambiguous && c.len() > 1))
            .map(|(k, c)| {
                let lemma = modal_lemma(&c).expect("non-empty").to_owned();
                (k, lemma)
            })
            .collect();
        Ok(LemmaCache { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn insert(&mut self, key: CacheKey, lemma: impl Into<String>) {
        self.entries.insert(key, lemma.into());
    }

    pub fn get(&self, key: &CacheKey) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn lookup(&self, t: &Token) -> Option<&str> {
        self.get(&CacheKey::of(t))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&CacheKey, &str)> {
        self.entries.iter().map(|(k, v)| (k, v.as_str()))
    }

    /// `form<TAB>upos<TAB>xpos<TAB>feats<TAB>lemma` lines sorted by key.
    pub fn save<W: Write>(&self, mut w: W) -> Result<()> {
        for (k, lemma) in &self.entries {
            writeln!(w, "{}\t{}\t{}\t{}\t{}", k.form, k.upos, k.xpos, k.feats, lemma)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn save_file(&self, path: impl AsRef<Path>) -> Result<()> {
        self.save(BufWriter::new(File::create(path)?))
    }

    pub fn load<R: BufRead>(r: R, source_name: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
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
            let key = CacheKey {
                form: cols[0].to_owned(),
                upos: cols[1].to_owned(),
                xpos: cols[2].to_owned(),
                feats: cols[3].to_owned(),
            };
            if entries.insert(key, cols[4].to_owned()).is_some() {
                return Err(Error::parse(source_name, i + 1, "duplicate key"));
            }
        }
        Ok(LemmaCache { entries })
    }

    pub fn load_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::load(BufReader::new(File::open(path)?), &path.display().to_string())
    }
}
