mod common;

use autospline::automata::{join, SyncAutomaton};
use autospline::numeration::{addition_automaton, Base};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn constructions_match_the_word_model(seed in any::<u64>()) {
        common::closure_laws(seed, 5).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn minimization_is_canonical(seed in any::<u64>()) {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let a = common::Nfa::random(&mut rng, 2, 4).to_automaton();
        let m1 = a.minimize().unwrap();
        let m2 = a.determinize().unwrap().reorder(&[0, 1]).unwrap().minimize().unwrap();
        prop_assert_eq!(&m1, &m2);
        prop_assert!(m1.are_equivalent(&a).unwrap());
        let u = a.union(&a).unwrap().minimize().unwrap();
        prop_assert_eq!(u, m1);
    }

    #[test]
    fn complement_is_an_involution(seed in any::<u64>()) {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let a = common::Nfa::random(&mut rng, 2, 3).to_automaton();
        let u = common::Nfa::random(&mut rng, 2, 3).to_automaton();
        let inside = a.intersect(&u).unwrap();
        let twice = a.complement_within(&u).unwrap().complement_within(&u).unwrap();
        prop_assert!(twice.are_equivalent(&inside).unwrap());
        if let Some(w) = twice.distinguishing_word(&inside).unwrap() {
            prop_assert!(false, "distinguished by {:?}", w);
        }
    }
}

#[test]
fn addition_commutes_as_a_relation() {
    for b in [2, 4, 6] {
        let base = Base::new(b).unwrap();
        let add = addition_automaton(base, 1).unwrap();
        let swapped = add.reorder(&[1, 0, 2]).unwrap();
        assert!(add.are_equivalent(&swapped).unwrap(), "base {b}");
    }
}

#[test]
fn addition_is_associative() {
    let base = Base::new(2).unwrap();
    let add = addition_automaton(base, 1).unwrap();
    // tracks x y z s: s = (x + y) + z and s = x + (y + z)
    let left = join(&add, &[0, 1, 4], &add, &[4, 2, 3], 5).unwrap().project(&[0, 1, 2, 3]).unwrap();
    let right = join(&add, &[1, 2, 4], &add, &[0, 4, 3], 5).unwrap().project(&[0, 1, 2, 3]).unwrap();
    assert!(left.are_equivalent(&right).unwrap());
}

#[test]
fn empty_and_universal_edges() {
    let base = Base::new(2).unwrap();
    let e = SyncAutomaton::empty(base, 2);
    let u = common::Nfa { tracks: 2, initial: vec![0], accepting: vec![true], edges: vec![(0..8).map(|a| (a, 0)).collect()] }
        .to_automaton();
    assert!(e.complement_within(&u).unwrap().are_equivalent(&u).unwrap());
    assert!(u.complement_within(&u).unwrap().is_empty());
    assert!(e.project(&[1]).unwrap().is_empty());
}
