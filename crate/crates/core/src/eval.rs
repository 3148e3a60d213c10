//! Word-level lemma accuracy and macro-averaged error rates.

use std::io::Write;

use crate::ambiguity::csv_err;
use crate::conllu::Treebank;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct EvalResult {
    pub treebank: String,
    /// Tokens with a gold lemma.
    pub total: usize,
    pub correct: usize,
    /// Tokens skipped because the gold lemma is absent.
    pub excluded: usize,
}

impl EvalResult {
    pub fn accuracy(&self) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        self.correct as f64 / self.total as f64
    }

    pub fn error_rate(&self) -> f64 {
        1.0 - self.accuracy()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroupSummary {
    pub group: String,
    pub members: Vec<EvalResult>,
    pub macro_error_rate: f64,
}

/// Compare predicted lemmas against gold ones on identical tokenization.
pub fn evaluate(pred: &Treebank, gold: &Treebank) -> Result<EvalResult> {
    let mismatch = |sentence: usize, token: usize, detail: String| Error::TokenizationMismatch { sentence, token, detail };
    if pred.sentences.len() != gold.sentences.len() {
        let s = pred.sentences.len().min(gold.sentences.len()) + 1;
        return Err(mismatch(
            s,
            0,
            format!("{} predicted vs {} gold sentences", pred.sentences.len(), gold.sentences.len()),
        ));
    }
    let mut r = EvalResult {
        treebank: gold.name.clone(),
        total: 0,
        correct: 0,
        excluded: 0,
    };
    for (si, (ps, gs)) in pred.sentences.iter().zip(&gold.sentences).enumerate() {
        if ps.tokens.len() != gs.tokens.len() {
            let t = ps.tokens.len().min(gs.tokens.len()) + 1;
            return Err(mismatch(
                si + 1,
                t,
                format!("{} predicted vs {} gold tokens", ps.tokens.len(), gs.tokens.len()),
            ));
        }
        for (ti, (p, g)) in ps.tokens.iter().zip(&gs.tokens).enumerate() {
            if p.form != g.form {
                return Err(mismatch(si + 1, ti + 1, format!("form {:?} vs {:?}", p.form, g.form)));
            }
            match &g.lemma {
                None => r.excluded += 1,
                Some(gl) => {
                    r.total += 1;
                    if p.lemma.as_ref() == Some(gl) {
                        r.correct += 1;
                    }
                }
            }
        }
    }
    Ok(r)
}

/// Unweighted mean of member error rates.
pub fn macro_average(group: &str, results: &[EvalResult]) -> Result<GroupSummary> {
    if results.is_empty() {
        return Err(Error::invalid("macro average over an empty group"));
    }
    let mean = results.iter().map(EvalResult::error_rate).sum::<f64>() / results.len() as f64;
    Ok(GroupSummary {
        group: group.to_owned(),
        members: results.to_vec(),
        macro_error_rate: mean,
    })
}

/// `(base - ours) / base`; `None` when `base` is zero.
pub fn relative_error_reduction(base: f64, ours: f64) -> Option<f64> {
    (base != 0.0).then(|| (base - ours) / base)
}

/// CSV with one row per treebank, then a macro-average row per group.
pub fn write_eval_csv<W: Write>(results: &[EvalResult], groups: &[GroupSummary], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["treebank", "tokens", "correct", "accuracy", "error_rate"])
        .map_err(csv_err)?;
    for r in results {
        out.write_record([
            r.treebank.clone(),
            r.total.to_string(),
            r.correct.to_string(),
            format!("{:.4}", r.accuracy()),
            format!("{:.2}", 100.0 * r.error_rate()),
        ])
        .map_err(csv_err)?;
    }
    for g in groups {
        let tokens: usize = g.members.iter().map(|m| m.total).sum();
        let correct: usize = g.members.iter().map(|m| m.correct).sum();
        out.write_record([
            format!("macro:{}", g.group),
            tokens.to_string(),
            correct.to_string(),
            format!("{:.4}", 1.0 - g.macro_error_rate),
            format!("{:.2}", 100.0 * g.macro_error_rate),
        ])
        .map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conllu::{Sentence, Token};

    fn bank(lemmas: &[&str]) -> Treebank {
        let toks = lemmas
            .iter()
            .enumerate()
            .map(|(i, l)| Token::new(i + 1, format!("w{i}")).with_lemma(*l))
            .collect();
        Treebank::new("t", vec![Sentence::from_tokens(toks)])
    }

    fn result(total: usize, correct: usize) -> EvalResult {
        EvalResult {
            treebank: "x".into(),
            total,
            correct,
            excluded: 0,
        }
    }

    #[test]
    fn identical_is_perfect() {
        let g = bank(&["a", "b", "c"]);
        assert_eq!(evaluate(&g, &g).unwrap().accuracy(), 1.0);
    }

    #[test]
    fn nine_of_ten() {
        let gold = bank(&["a"; 10]);
        let mut lemmas = vec!["a"; 10];
        lemmas[3] = "b";
        let r = evaluate(&bank(&lemmas), &gold).unwrap();
        assert_eq!((r.correct, r.total), (9, 10));
        assert!((r.error_rate() - 0.1).abs() < 1e-12);
    }

    #[test]
    fn token_count_mismatch_is_located() {
        match evaluate(&bank(&["a", "b"]), &bank(&["a", "b", "c"])) {
            Err(Error::TokenizationMismatch { sentence, token, .. }) => assert_eq!((sentence, token), (1, 3)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn absent_gold_lemmas_excluded() {
        let mut gold = bank(&["a", "b"]);
        gold.sentences[0].tokens[1].lemma = None;
        let r = evaluate(&bank(&["a", "x"]), &gold).unwrap();
        assert_eq!((r.total, r.correct, r.excluded), (1, 1, 1));
    }

    #[test]
    fn macro_average_is_plain_mean() {
        assert!(macro_average("g", &[]).is_err());
        let one = macro_average("g", &[result(50, 49)]).unwrap();
        assert!((one.macro_error_rate - 0.02).abs() < 1e-12);
        let two = macro_average("g", &[result(50, 49), result(1000, 960)]).unwrap();
        assert!((two.macro_error_rate - 0.03).abs() < 1e-12);
    }

    #[test]
    fn relative_reduction() {
        assert!((relative_error_reduction(0.10, 0.08).unwrap() - 0.2).abs() < 1e-12);
        assert_eq!(relative_error_reduction(0.05, 0.05), Some(0.0));
        assert_eq!(relative_error_reduction(0.0, 0.01), None);
        let r = relative_error_reduction(12.75, 8.98).unwrap();
        assert!((r - 0.2957).abs() < 1e-4);
    }
}
