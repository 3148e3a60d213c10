mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ulem::conllu::{Sentence, Token, Treebank};
use ulem::lexicon::{coverage_and_recall, load_lexicon};

#[test]
fn hand_case() {
    let lex = load_lexicon(
        "a\tx\tNOUN\t_\t_\nb\ty\tNOUN\t_\t_\nc\tz\tNOUN\t_\t_\nd\tw\tNOUN\t_\t_\nd\tv\tVERB\t_\t_\n".as_bytes(),
        "lex",
    )
    .unwrap();
    let toks = [("a", "x"), ("b", "y"), ("c", "z"), ("d", "q"), ("e", "e")]
        .iter()
        .enumerate()
        .map(|(i, (f, l))| Token::new(i + 1, *f).with_lemma(*l))
        .collect();
    let r = coverage_and_recall(&lex, &Treebank::new("t", vec![Sentence::from_tokens(toks)])).unwrap();
    assert_eq!((r.coverage(), r.recall()), (0.8, 0.6));
}

#[test]
fn recall_never_exceeds_coverage() {
    for seed in 0..100 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (lex, tb) = common::random_lexicon_pair(&mut rng);
        let r = coverage_and_recall(&lex, &tb).unwrap();
        assert!(r.recall() <= r.coverage(), "seed {seed}");
        assert!((0.0..=1.0).contains(&r.coverage()));
    }
}

proptest! {
    #[test]
    fn adding_entries_never_lowers_either_rate(seed in any::<u64>(), extra in 0u64..1000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (lex, tb) = common::random_lexicon_pair(&mut rng);
        let mut rng2 = ChaCha8Rng::seed_from_u64(extra);
        let (more, _) = common::random_lexicon_pair(&mut rng2);
        let mut bigger = lex.clone();
        bigger.extend(more);
        let a = coverage_and_recall(&lex, &tb).unwrap();
        let b = coverage_and_recall(&bigger, &tb).unwrap();
        prop_assert!(b.covered >= a.covered);
        prop_assert!(b.recalled >= a.recalled);
    }
}
