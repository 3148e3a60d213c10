//! Lemma ambiguity over running tokens.
//!
//! A token is *form-ambiguous* when its surface form is seen with two or more
//! distinct lemmas anywhere in the corpus, and *tag-ambiguous* when the same
//! holds for its full `(form, UPOS, XPOS, FEATS)` key.

use std::collections::{BTreeMap, HashMap, HashSet};

use crate::conllu::{Token, Treebank};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AmbiguityReport {
    pub total_tokens: usize,
    pub token_ambiguous: usize,
    pub tokentag_ambiguous: usize,
}

impl AmbiguityReport {
    pub fn token_rate(&self) -> f64 {
        ratio(self.token_ambiguous, self.total_tokens)
    }

    pub fn tokentag_rate(&self) -> f64 {
        ratio(self.tokentag_ambiguous, self.total_tokens)
    }
}

fn ratio(n: usize, d: usize) -> f64 {
    if d == 0 {
        0.0
    } else {
        n as f64 / d as f64
    }
}

/// Render a rate with four decimals.
pub fn format_rate(rate: f64) -> String {
    format!("{rate:.4}")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkewEntry {
    pub form: String,
    pub tags: String,
    pub top_lemma: String,
    pub top_count: usize,
    pub second_lemma: String,
    pub second_count: usize,
}

/// `(form, UPOS, XPOS, FEATS)` with absent columns rendered as `_`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct TagKey {
    pub form: String,
    pub tags: String,
}

impl TagKey {
    pub fn of(t: &Token) -> Self {
        TagKey {
            form: t.form.clone(),
            tags: t.tag_string(),
        }
    }
}

fn lemma_of<'a>(t: &'a Token, sentence: usize) -> Result<&'a str> {
    t.lemma.as_deref().ok_or(Error::MissingLemma {
        sentence,
        token: t.id,
    })
}

pub fn compute_ambiguity(tb: &Treebank) -> Result<AmbiguityReport> {
    let mut by_form: HashMap<&str, HashSet<&str>> = HashMap::new();
    let mut by_key: HashMap<TagKey, HashSet<&str>> = HashMap::new();
    for (si, s) in tb.sentences.iter().enumerate() {
        for t in &s.tokens {
            let lemma = lemma_of(t, si + 1)?;
            by_form.entry(&t.form).or_default().insert(lemma);
            by_key.entry(TagKey::of(t)).or_default().insert(lemma);
        }
    }

    let mut report = AmbiguityReport {
        total_tokens: 0,
        token_ambiguous: 0,
        tokentag_ambiguous: 0,
    };
    for t in tb.tokens() {
        report.total_tokens += 1;
        if by_form[t.form.as_str()].len() > 1 {
            report.token_ambiguous += 1;
        }
        if by_key[&TagKey::of(t)].len() > 1 {
            report.tokentag_ambiguous += 1;
        }
    }
    Ok(report)
}

/// The `k` most frequent tag-ambiguous `(form, tags)` keys with their two most
/// frequent lemmas.
///
/// Keys are ranked by running-token count, then form, then tag string. Within
/// a key, lemmas rank by count and then lexicographically.
pub fn top_ambiguous_skew(tb: &Treebank, k: usize) -> Result<Vec<SkewEntry>> {
    let mut counts: HashMap<TagKey, BTreeMap<&str, usize>> = HashMap::new();
    for (si, s) in tb.sentences.iter().enumerate() {
        for t in &s.tokens {
            let lemma = lemma_of(t, si + 1)?;
            *counts.entry(TagKey::of(t)).or_default().entry(lemma).or_default() += 1;
        }
    }

    let mut entries: Vec<(usize, SkewEntry)> = counts
        .into_iter()
        .filter(|(_, lemmas)| lemmas.len() > 1)
        .map(|(key, lemmas)| {
            let total = lemmas.values().sum();
            let mut ranked: Vec<(&str, usize)> = lemmas.into_iter().collect();
            ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
            let entry = SkewEntry {
                form: key.form,
                tags: key.tags,
                top_lemma: ranked[0].0.to_owned(),
                top_count: ranked[0].1,
                second_lemma: ranked[1].0.to_owned(),
                second_count: ranked[1].1,
            };
            (total, entry)
        })
        .collect();
    entries.sort_by(|(ca, a), (cb, b)| {
        cb.cmp(ca)
            .then_with(|| a.form.cmp(&b.form))
            .then_with(|| a.tags.cmp(&b.tags))
    });
    Ok(entries.into_iter().take(k).map(|(_, e)| e).collect())
}

/// Concatenate treebanks, keeping sentence order.
pub fn pool_treebanks(tbs: &[Treebank]) -> Treebank {
    let name = tbs
        .iter()
        .map(|t| t.name.as_str())
        .collect::<Vec<_>>()
        .join("+");
    Treebank::new(
        name,
        tbs.iter().flat_map(|t| t.sentences.iter().cloned()).collect(),
    )
}

/// CSV with one row per treebank; callers append a pooled row themselves.
pub fn write_report_csv<W: std::io::Write>(
    rows: &[(String, AmbiguityReport)],
    writer: W,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([
        "treebank",
        "tokens",
        "token_ambiguous",
        "tokentag_ambiguous",
        "token_rate",
        "tokentag_rate",
    ])
    .map_err(csv_err)?;
    for (name, r) in rows {
        w.write_record([
            name.clone(),
            r.total_tokens.to_string(),
            r.token_ambiguous.to_string(),
            r.tokentag_ambiguous.to_string(),
            format_rate(r.token_rate()),
            format_rate(r.tokentag_rate()),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_skew_csv<W: std::io::Write>(entries: &[SkewEntry], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["form", "tags", "lemma1", "count1", "lemma2", "count2"])
        .map_err(csv_err)?;
    for e in entries {
        w.write_record([
            e.form.clone(),
            e.tags.clone(),
            e.top_lemma.clone(),
            e.top_count.to_string(),
            e.second_lemma.clone(),
            e.second_count.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub(crate) fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::invalid(format!("csv: {other:?}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conllu::{Features, Sentence};

    fn tok(form: &str, lemma: &str, upos: &str) -> Token {
        Token::new(0, form).with_lemma(lemma).with_upos(upos)
    }

    fn bank(tokens: Vec<Token>) -> Treebank {
        Treebank::new("t", vec![Sentence::from_tokens(tokens)])
    }

    #[test]
    fn lives_is_form_ambiguous_but_not_tag_ambiguous() {
        let tb = bank(vec![tok("lives", "life", "NOUN"), tok("lives", "live", "VERB")]);
        let r = compute_ambiguity(&tb).unwrap();
        assert_eq!(r.total_tokens, 2);
        assert_eq!(r.token_ambiguous, 2);
        assert_eq!(r.tokentag_ambiguous, 0);
        assert_eq!(r.token_rate(), 1.0);
        assert_eq!(r.tokentag_rate(), 0.0);
    }

    #[test]
    fn unambiguous_corpus_has_zero_rates() {
        let tb = bank(vec![tok("a", "a", "DET"), tok("dogs", "dog", "NOUN")]);
        let r = compute_ambiguity(&tb).unwrap();
        assert_eq!((r.token_rate(), r.tokentag_rate()), (0.0, 0.0));
        assert!(top_ambiguous_skew(&tb, 10).unwrap().is_empty());
    }

    #[test]
    fn vs_skew_entry() {
        let mut tokens = vec![tok("vs.", "vs.", "ADP"); 17];
        tokens.push(tok("vs.", "versus", "ADP"));
        let skew = top_ambiguous_skew(&bank(tokens), 100).unwrap();
        assert_eq!(skew.len(), 1);
        assert_eq!(skew[0].top_lemma, "vs.");
        assert_eq!(skew[0].top_count, 17);
        assert_eq!(skew[0].second_lemma, "versus");
        assert_eq!(skew[0].second_count, 1);
    }

    #[test]
    fn feats_participate_in_tag_key() {
        let a = tok("x", "a", "NOUN").with_feats(Features::parse("Case=Nom").unwrap());
        let b = tok("x", "b", "NOUN").with_feats(Features::parse("Case=Gen").unwrap());
        let r = compute_ambiguity(&bank(vec![a, b])).unwrap();
        assert_eq!(r.tokentag_ambiguous, 0);
        assert_eq!(r.token_ambiguous, 2);
    }

    #[test]
    fn missing_lemma_names_sentence() {
        let tb = Treebank::new(
            "t",
            vec![
                Sentence::from_tokens(vec![tok("a", "a", "X")]),
                Sentence::from_tokens(vec![Token::new(1, "b")]),
            ],
        );
        assert!(matches!(
            compute_ambiguity(&tb),
            Err(Error::MissingLemma { sentence: 2, token: 1 })
        ));
    }

    #[test]
    fn pooling_one_is_identity_on_sentences() {
        let tb = bank(vec![tok("a", "a", "X")]);
        assert_eq!(pool_treebanks(&[tb.clone()]).sentences, tb.sentences);
    }

    #[test]
    fn pooled_token_count_is_sum() {
        let a = bank(vec![tok("a", "a", "X"), tok("b", "b", "X")]);
        let b = bank(vec![tok("c", "c", "X")]);
        assert_eq!(pool_treebanks(&[a, b]).token_count(), 3);
    }

    #[test]
    fn skew_truncates_to_k() {
        let mut tokens = Vec::new();
        for form in ["p", "q", "r"] {
            tokens.push(tok(form, "1", "X"));
            tokens.push(tok(form, "2", "X"));
        }
        tokens.push(tok("q", "1", "X"));
        let skew = top_ambiguous_skew(&bank(tokens), 2).unwrap();
        assert_eq!(
            skew.iter().map(|e| e.form.as_str()).collect::<Vec<_>>(),
            ["q", "p"]
        );
    }

    #[test]
    fn rates_render_four_decimals() {
        assert_eq!(format_rate(1.0 / 3.0), "0.3333");
    }
}
