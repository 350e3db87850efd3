use super::*;
use crate::mesh::Cell;

fn q(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}

fn b(n: u32) -> Base {
    Base::new(n).unwrap()
}

#[test]
fn cardinal_values() {
    assert_eq!(bspline_value(1, 0, 0, &q(1, 2)), q(1, 2));
    assert_eq!(bspline_value(2, 0, 0, &q(3, 2)), q(3, 4));
    assert_eq!(bspline_value(3, 0, 0, &q(2, 1)), q(2, 3));
    assert_eq!(bspline_value(3, 0, 4, &q(6, 1)), q(2, 3));
    assert_eq!(bspline_value(3, 2, 0, &q(1, 2)), q(2, 3));
    assert_eq!(bspline_value(0, 0, 0, &q(0, 1)), q(1, 1));
    assert_eq!(bspline_value(0, 0, 0, &q(1, 1)), q(0, 1));
    assert_eq!(bspline_value(2, 1, -1, &q(-1, 1)), q(0, 1));
}

#[test]
fn base_requirements() {
    assert!(degree_supported(2, 2));
    assert!(!degree_supported(3, 2));
    assert!(degree_supported(3, 6));
    assert!(degree_supported(3, 12));
    assert!(!degree_supported(5, 6));
}

#[test]
fn identity_hat_spline() {
    let f = linear_spline(&[q(1, 1)], &q(0, 1), 1, b(2)).unwrap();
    f.check_invariants().unwrap();
    let c = f.coefficient(&crate::kraft::BasisFunctionId::from_knot_index(0, 1, &[0])).unwrap();
    assert_eq!(c, Some(q(1, 1)));
    let e = f.evaluate(&[q(5, 4)]).unwrap();
    assert_eq!(e.value, q(5, 4));
    let mut got: Vec<(Q, Q)> = e.matches.iter().map(|m| (m.coefficient.clone(), m.value.clone())).collect();
    got.sort();
    assert_eq!(got, vec![(q(1, 1), q(3, 4)), (q(2, 1), q(1, 4))]);
}

#[test]
fn linear_reproduction() {
    let f = linear_spline(&[q(1, 1)], &q(0, 1), 3, b(6)).unwrap();
    let c = f.coefficient(&crate::kraft::BasisFunctionId::from_knot_index(0, 3, &[0])).unwrap();
    assert_eq!(c, Some(q(2, 1)));
    for m in 1..=3u32 {
        let base = if m == 3 { b(6) } else { b(2) };
        let f = linear_spline(&[q(3, 2), q(-1, 1)], &q(1, 4), m, base).unwrap();
        for (x, y) in [(q(1, 2), q(3, 4)), (q(-7, 8), q(5, 2)), (q(0, 1), q(0, 1))] {
            let v = f.evaluate(&[x.clone(), y.clone()]).unwrap();
            assert_eq!(v.value, q(3, 2) * x - y + q(1, 4));
            assert!(v.matches.len() <= ((m + 1) * (m + 1)) as usize);
        }
    }
    let f = linear_spline(&[q(1, 1), q(1, 1)], &q(0, 1), 1, b(2)).unwrap();
    assert_eq!(f.evaluate(&[q(1, 2), q(3, 4)]).unwrap().value, q(5, 4));
}

#[test]
fn constants_and_module_operations() {
    for m in 0..=2u32 {
        let f = constant_spline(&q(7, 4), 1, m, b(4)).unwrap();
        for x in [q(0, 1), q(1, 2), q(-13, 16), q(5, 1)] {
            assert_eq!(f.evaluate(&[x]).unwrap().value, q(7, 4), "m={m}");
        }
    }
    let f = linear_spline(&[q(1, 1)], &q(1, 2), 2, b(2)).unwrap();
    let g = linear_spline(&[q(-3, 1)], &q(1, 1), 2, b(2)).unwrap();
    let sum = add_splines(&f, &g).unwrap();
    sum.check_invariants().unwrap();
    let twice = scale_spline(&q(2, 1), &f).unwrap();
    let zero = RegularSpline::zero(f.basis().clone()).unwrap();
    assert!(add_splines(&f, &zero).unwrap().relation(0).are_equivalent(f.relation(0)).unwrap());
    assert!(scale_spline(&q(1, 1), &f).unwrap().relation(0).are_equivalent(f.relation(0)).unwrap());
    for x in [q(3, 8), q(-5, 2)] {
        let fx = f.evaluate(std::slice::from_ref(&x)).unwrap().value;
        let gx = g.evaluate(std::slice::from_ref(&x)).unwrap().value;
        assert_eq!(sum.evaluate(std::slice::from_ref(&x)).unwrap().value, &fx + gx);
        assert_eq!(twice.evaluate(std::slice::from_ref(&x)).unwrap().value, fx * q(2, 1));
    }
    let other = linear_spline(&[q(1, 1)], &q(0, 1), 1, b(2)).unwrap();
    assert!(add_splines(&f, &other).is_err());
}

#[test]
fn broken_relations_are_rejected() {
    let f = linear_spline(&[q(1, 1)], &q(0, 1), 1, b(2)).unwrap();
    let extra = zero_relation(f.basis().language(0)).unwrap();
    let two = f.relation(0).union(&extra).unwrap();
    assert!(RegularSpline::new(f.basis().clone(), vec![two]).is_err());
    let half = f.relation(0).intersect(&constant_relation_for_test(f.basis().language(0))).unwrap();
    assert!(RegularSpline::new(f.basis().clone(), vec![half]).is_err());
}

// anchors with nonnegative barycentre paired with any coefficient
fn constant_relation_for_test(anchors: &SyncAutomaton) -> SyncAutomaton {
    let base = anchors.base();
    let pos = crate::mesh::Pattern::Box { lo: vec![q(0, 1)], hi: vec![q(1000, 1)] }.automaton(base, 1, 0).unwrap();
    let any = crate::numeration::valid_encoding_automaton(base, 1).unwrap();
    join(&pos, &[0], &any, &[1], 2).unwrap()
}

#[test]
fn worked_examples() {
    let (g, h) = builtin_examples().unwrap();
    g.check_invariants().unwrap();
    h.check_invariants().unwrap();
    assert!(g.basis().verified());
    assert!(!h.basis().verified());
    assert!(build_kraft_languages(h.mesh()).is_err());
    assert_eq!(g.evaluate(&[q(2, 1)]).unwrap().value, q(2, 3));
    assert_eq!(g.evaluate(&[q(6, 1)]).unwrap().value, q(-2, 3));
    assert_eq!(g.evaluate(&[q(-2, 1)]).unwrap().value, q(-2, 3));
    assert_eq!(h.evaluate(&[q(1, 2)]).unwrap().value, q(2, 3));
    assert_eq!(h.evaluate(&[q(5, 2)]).unwrap().value, q(4, 3));
    assert_eq!(h.evaluate(&[q(-1, 2)]).unwrap().value, q(2, 3));
    assert_eq!(h.evaluate(&[q(-5, 2)]).unwrap().value, q(4, 3));
    let top = BasisFunctionId::new(3, Cell::new(2, vec![2 + 8 * 5]));
    assert_eq!(h.coefficient(&top).unwrap(), Some(q(6, 1)));
}

#[test]
fn manifests_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let h = builtin_h().unwrap();
    let path = dir.path().join("h.spline");
    h.save(&path).unwrap();
    let back = RegularSpline::load(&path).unwrap();
    for l in 0..3 {
        assert!(back.relation(l).are_equivalent(h.relation(l)).unwrap());
    }
    assert_eq!(back.evaluate(&[q(1, 2)]).unwrap().value, q(2, 3));
    let f = linear_spline(&[q(1, 1)], &q(0, 1), 1, b(2)).unwrap();
    let p = dir.path().join("f.spline");
    f.save(&p).unwrap();
    assert_eq!(RegularSpline::load(&p).unwrap().evaluate(&[q(3, 8)]).unwrap().value, q(3, 8));
}

#[test]
fn rejects_bad_points() {
    let f = linear_spline(&[q(1, 1)], &q(0, 1), 1, b(2)).unwrap();
    assert!(matches!(f.evaluate(&[q(1, 3)]), Err(Error::Usage(_))));
    assert!(matches!(f.evaluate(&[q(1, 2), q(1, 2)]), Err(Error::Usage(_))));
}
