//! Most-common-lemma lookup with copy-through for unknown forms.

use std::collections::{BTreeMap, HashMap};

use crate::cache::modal_lemma;
use crate::conllu::Treebank;
use crate::error::Result;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LookupBaseline {
    table: BTreeMap<String, String>,
}

impl LookupBaseline {
    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn get(&self, form: &str) -> Option<&str> {
        self.table.get(form).map(String::as_str)
    }
}

/// Modal lemma per form, ignoring tags. Ties go to the smaller lemma.
pub fn build_lookup(train: &Treebank) -> Result<LookupBaseline> {
    train.require_lemmas()?;
    let mut counts: HashMap<&str, HashMap<String, usize>> = HashMap::new();
    for t in train.tokens() {
        let lemma = t.lemma.clone().expect("checked above");
        *counts.entry(&t.form).or_default().entry(lemma).or_default() += 1;
    }
    let table = counts
        .into_iter()
        .map(|(form, c)| (form.to_owned(), modal_lemma(&c).expect("non-empty").to_owned()))
        .collect();
    Ok(LookupBaseline { table })
}

pub fn predict_lookup(b: &LookupBaseline, form: &str) -> String {
    b.get(form).unwrap_or(form).to_owned()
}

/// Fill every LEMMA of `tb` from the baseline.
pub fn lemmatize_lookup(b: &LookupBaseline, tb: &mut Treebank) {
    for t in tb.tokens_mut() {
        t.lemma = Some(predict_lookup(b, &t.form));
    }
}
