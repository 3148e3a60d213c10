//! Beam search and greedy decoding over a hand-written scoring model.
//!
//! Greedy commits to the locally best first symbol; a beam of two finds the
//! better sequence behind a slightly worse start.

use ulem::inference::{beam_search, greedy_decode, Step, StepModel};

const BOS: u32 = 0;
const EOS: u32 = 1;
const NAMES: [&str; 4] = ["<s>", "</s>", "a", "b"];

struct Scores;

impl StepModel for Scores {
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

    fn step(&self, states: &[&Vec<u32>], prev: &[u32]) -> ulem::Result<Vec<Step<Vec<u32>>>> {
        let p = |v: [f64; 3]| vec![f64::NEG_INFINITY, v[0].ln(), v[1].ln(), v[2].ln()];
        Ok(states
            .iter()
            .zip(prev)
            .map(|(s, &last)| {
                let mut prefix = (*s).clone();
                if last != BOS {
                    prefix.push(last);
                }
                let log_probs = match prefix.as_slice() {
                    [] => p([0.1, 0.5, 0.4]),
                    [2] => p([0.4, 0.3, 0.3]),
                    [3] => p([0.9, 0.05, 0.05]),
                    _ => p([0.8, 0.1, 0.1]),
                };
                Step { log_probs, attention: vec![1.0], state: prefix }
            })
            .collect())
    }
}

fn spell(ids: &[u32]) -> String {
    ids.iter().map(|&i| NAMES[i as usize]).collect::<Vec<_>>().join(" ")
}

fn main() -> ulem::Result<()> {
    let g = greedy_decode(&Scores, 5)?;
    println!("greedy   {:<8} p={:.3}", spell(&g.output), g.log_prob.exp());
    for width in [1, 2, 4] {
        let hyps = beam_search(&Scores, width, 5)?;
        let best = &hyps[0];
        println!("beam {width}   {:<8} p={:.3}", spell(&best.output), best.log_prob.exp());
    }
    Ok(())
}
