mod common;

use autospline::automata::convolve;
use autospline::numeration::{
    addition_automaton, decode, encode, encode_point, less_than_automaton, scalar_multiple_automaton,
    valid_encoding_automaton, Base,
};
use autospline::Q;
use num_bigint::BigInt;
use proptest::prelude::*;

fn dyadic(base: u32) -> impl Strategy<Value = Q> {
    (-100_000i64..100_000, 0u32..12).prop_map(move |(n, e)| Q::new(n.into(), BigInt::from(base).pow(e)))
}

fn even_base() -> impl Strategy<Value = u32> {
    prop::sample::select(vec![2u32, 4, 6, 8, 10, 12, 14])
}

fn accepts(a: &autospline::automata::SyncAutomaton, z: &[Q], base: Base) -> bool {
    a.accepts(&convolve(&encode_point(z, base).unwrap()))
}

proptest! {
    #[test]
    fn encoding_round_trips((b, z) in even_base().prop_flat_map(|b| (Just(b), dyadic(b)))) {
        let base = Base::new(b).unwrap();
        let w = encode(&z, base).unwrap();
        prop_assert_eq!(decode(&w, base).unwrap(), z.clone());
        let v = valid_encoding_automaton(base, 1).unwrap();
        prop_assert!(accepts(&v, &[z], base));
    }

    #[test]
    fn addition_matches_rationals(x in dyadic(2), y in dyadic(2), delta in 1i64..50) {
        let base = Base::new(2).unwrap();
        let add = addition_automaton(base, 1).unwrap();
        let s = &x + &y;
        prop_assert!(accepts(&add, &[x.clone(), y.clone(), s.clone()], base));
        let off = Q::new(delta.into(), 1024.into());
        prop_assert!(!accepts(&add, &[x, y, s + off], base));
    }

    #[test]
    fn order_matches_rationals(x in dyadic(6), y in dyadic(6)) {
        let base = Base::new(6).unwrap();
        let lt = less_than_automaton(base, 1).unwrap();
        prop_assert_eq!(accepts(&lt, &[x.clone(), y.clone()], base), x < y);
    }

    #[test]
    fn scalar_multiples_match_rationals(x in dyadic(2), p in -9i64..10, e in 0u32..4) {
        let base = Base::new(2).unwrap();
        let mu = Q::new(p.into(), BigInt::from(2).pow(e));
        let m = scalar_multiple_automaton(&mu, base).unwrap();
        let y = &mu * &x;
        prop_assert!(accepts(&m, &[x.clone(), y.clone()], base));
        prop_assert!(!accepts(&m, &[x, y + Q::new(1.into(), 4096.into())], base));
    }
}

#[test]
fn worked_encoding() {
    let base = Base::new(2).unwrap();
    let w = encode(&common::q(-27, 8), base).unwrap();
    assert_eq!(w.rows(), "1110/1011");
}
