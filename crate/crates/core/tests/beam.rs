mod common;

use common::{exhaustive, TableModel, BOS, EOS};
use proptest::prelude::*;
use ulem::inference::{beam_search, greedy_decode, Step, StepModel};
use ulem::Result;

#[test]
fn full_width_beam_matches_exhaustive_ranking() {
    for seed in 0..100 {
        let vocab = 3 + (seed as usize % 2);
        let max_len = 1 + (seed as usize % 4);
        let m = TableModel::random(seed, vocab);
        let oracle = exhaustive(&m, max_len);
        let beam = beam_search(&m, 256, max_len).unwrap();
        let got: Vec<(Vec<u32>, f64)> = beam.iter().map(|h| (h.output.clone(), h.log_prob)).collect();
        assert_eq!(got, oracle, "seed {seed}");
        assert_eq!(beam[0].output, oracle[0].0);
    }
}

#[test]
fn narrow_beam_returns_sorted_unique_outputs() {
    for seed in 0..50 {
        let m = TableModel::random(seed, 4);
        let beam = beam_search(&m, 3, 4).unwrap();
        for w in beam.windows(2) {
            assert!(w[0].log_prob >= w[1].log_prob);
            if w[0].log_prob == w[1].log_prob {
                assert!(w[0].output < w[1].output);
            }
        }
        let oracle = exhaustive(&m, 4);
        for h in &beam {
            assert!(oracle.iter().any(|(o, s)| *o == h.output && *s == h.log_prob));
        }
    }
}

/// Fixed log-probabilities keyed by prefix.
struct Scripted;

impl StepModel for Scripted {
    type State = Vec<u32>;

    fn bos(&self) -> u32 {
        BOS
    }

    fn eos(&self) -> u32 {
        EOS
    }

    fn initial_state(&self) -> Vec<u32> {
        Vec::new()
    }

    fn step(&self, states: &[&Vec<u32>], prev: &[u32]) -> Result<Vec<Step<Vec<u32>>>> {
        let ninf = f64::NEG_INFINITY;
        Ok(states
            .iter()
            .zip(prev)
            .map(|(s, &p)| {
                let mut next = (*s).clone();
                if p != BOS {
                    next.push(p);
                }
                let log_probs = match next.as_slice() {
                    [] => vec![ninf, -5.0, -1.0, -1.1],
                    [2] => vec![ninf, -0.2, -10.0, -10.0],
                    [3] => vec![ninf, -10.0, -0.05, -0.06],
                    _ => vec![ninf, -10.0, -10.0, -10.0],
                };
                Step {
                    log_probs,
                    attention: vec![1.0],
                    state: next,
                }
            })
            .collect())
    }
}

#[test]
fn wider_beam_is_not_always_better() {
    let one = beam_search(&Scripted, 1, 4).unwrap();
    let two = beam_search(&Scripted, 2, 4).unwrap();
    assert_eq!(one[0].output, vec![2]);
    assert!((one[0].log_prob + 1.2).abs() < 1e-12);
    assert!(two[0].log_prob < one[0].log_prob);
    // Exhaustive width still dominates every narrower beam.
    let wide = beam_search(&Scripted, 64, 4).unwrap();
    assert!(wide[0].log_prob >= one[0].log_prob);
    assert!(wide[0].log_prob >= two[0].log_prob);
}

#[test]
fn zero_beam_or_length_is_rejected() {
    let m = TableModel::random(0, 3);
    assert!(beam_search(&m, 0, 3).is_err());
    assert!(beam_search(&m, 2, 0).is_err());
}

proptest! {
    #[test]
    fn beam_of_one_is_greedy(seed in any::<u64>(), vocab in 3usize..6, max_len in 1usize..6) {
        let m = TableModel::random(seed, vocab);
        let b = beam_search(&m, 1, max_len).unwrap();
        let g = greedy_decode(&m, max_len).unwrap();
        prop_assert_eq!(b.len(), 1);
        prop_assert_eq!(&b[0].output, &g.output);
        prop_assert_eq!(b[0].log_prob, g.log_prob);
        prop_assert_eq!(b[0].ended, g.ended);
    }

    #[test]
    fn exhaustive_width_dominates(seed in any::<u64>(), k in 1usize..5) {
        let m = TableModel::random(seed, 4);
        let narrow = beam_search(&m, k, 4).unwrap();
        let best = exhaustive(&m, 4)[0].1;
        prop_assert!(narrow[0].log_prob <= best);
    }
}
