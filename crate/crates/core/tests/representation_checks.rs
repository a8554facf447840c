use std::sync::Arc;

use num_complex::Complex64;
use proptest::prelude::*;
use unipotent_core::group::UnipotentMatrix;
use unipotent_core::measure::{sample_many, MeasureParams};
use unipotent_core::representation::{
    battery, check_commutator_exponent, check_conjugation_lemma, check_delta_forms, check_group_commutator,
    check_j_involution, check_jtj, check_left_right_commute, check_nested_commutator, check_s_factorization,
    check_tl_homomorphism, check_tr_homomorphism, check_unitarity, ln_delta_histogram, mc_inner, relative_deviation,
    uniform_parameters, CheckContext, Operator, Point, StateFunction, TransformedFunction,
};

const TOL: f64 = 1e-9;

fn ctx() -> CheckContext {
    CheckContext::sampled(MeasureParams::geometric(2.0, 4).unwrap(), 4, 300, 17).unwrap()
}

fn pairs(ctx: &CheckContext, count: usize, seed: u64) -> Vec<(Point, Point)> {
    let e = ctx.random_elements(2 * count, seed).unwrap();
    e.chunks(2).map(|c| (c[0].clone(), c[1].clone())).collect()
}

#[test]
fn modular_conjugation_identities() {
    let c = ctx();
    assert!(check_j_involution(&c).passes(TOL));
    let ts = c.random_elements(10, 3).unwrap();
    let r = check_jtj(&c, &ts);
    assert!(r.passes(TOL), "{r:?}");
    assert!(check_jtj(&c, &[Point::identity(4)]).passes(TOL));
    for r in check_s_factorization(&c) {
        assert!(r.passes(TOL), "{r:?}");
    }
}

#[test]
fn translations_are_homomorphisms_and_commute() {
    let c = ctx();
    assert!(check_tr_homomorphism(&c, &pairs(&c, 5, 4)).passes(1e-10));
    assert!(check_tl_homomorphism(&c, &pairs(&c, 5, 5)).passes(1e-10));
    assert!(check_left_right_commute(&c, &pairs(&c, 5, 6)).passes(TOL));
}

#[test]
fn conjugation_lemma_for_several_multipliers() {
    let c = ctx();
    let ts = c.random_elements(4, 8).unwrap();
    let gs = [
        StateFunction::coordinate(1, 3),
        StateFunction::coordinate(2, 4),
        StateFunction::plane_wave(1, 4, 0.4),
        StateFunction::coordinate(1, 2).product(&StateFunction::coordinate(3, 4)),
    ];
    let cases: Vec<_> = gs.iter().cloned().zip(ts).collect();
    assert!(check_conjugation_lemma(&c, &cases).passes(TOL));
}

#[test]
fn group_commutators_with_delta_flow() {
    let c = ctx();
    let t = uniform_parameters(5, 1.0, 1);
    let s = uniform_parameters(5, 2.0, 2);
    let cases: Vec<_> = t.iter().copied().zip(s.iter().copied()).collect();
    for m in 1..4 {
        let r = check_group_commutator(&c, m, &cases).unwrap();
        assert!(r.passes(TOL), "{r:?}");
        let e = check_commutator_exponent(&c, m, &t).unwrap();
        assert!(e.passes(1e-10), "{e:?}");
    }
    let nested: Vec<_> = (0..5).map(|i| (t[i], t[(i + 1) % 5], s[i])).collect();
    assert!(check_nested_commutator(&c, &nested).unwrap().passes(TOL));
    assert!(check_delta_forms(&c).unwrap().passes(1e-10));
}

#[test]
fn deviation_is_scale_invariant() {
    let c = ctx();
    let ts = c.random_elements(3, 9).unwrap();
    let scaled = CheckContext {
        functions: c.functions.iter().map(|f| f.scale(Complex64::new(1e3, 0.0))).collect(),
        ..c.clone()
    };
    let a = check_jtj(&c, &ts).max_deviation;
    let b = check_jtj(&scaled, &ts).max_deviation;
    assert!(a <= TOL && b <= TOL);
}

#[test]
fn unitarity_and_flow_invariance() {
    let params = Arc::new(MeasureParams::geometric(2.0, 4).unwrap());
    let points = sample_many(&params, 4, 20_000, 42).unwrap();
    let t = sample_many(&params, 4, 2, 43).unwrap();
    let f = battery(4);
    for word in [vec![Operator::Right(t[0].clone())], vec![Operator::Left(t[1].clone())]] {
        for u in check_unitarity(&params, 4, &points, &f, &word).unwrap() {
            assert!(u.passes(3.0), "{u:?}");
        }
    }
    let flow = [Operator::DeltaPow(Complex64::new(0.0, 0.8))];
    for u in check_unitarity(&params, 4, &points, &f, &flow).unwrap() {
        assert!(u.difference.std_error < 1e-12);
        assert!(u.difference.re.abs() < 1e-12);
    }
}

#[test]
fn inner_products() {
    let p = MeasureParams::geometric(2.0, 4).unwrap();
    let x23 = StateFunction::coordinate(2, 3);
    let e = mc_inner(&p, 4, &x23, &x23, 50_000, 1).unwrap();
    assert!(e.within(Complex64::new(1.0 / 128.0, 0.0), 3.0), "{e:?}");
    assert_eq!(mc_inner(&p, 4, &x23, &x23, 50_000, 1).unwrap(), e);
}

#[test]
fn ln_delta_spread_grows_with_size() {
    let p = MeasureParams::geometric(2.0, 5).unwrap();
    let h3 = ln_delta_histogram(&p, 3, 20_000, 20, 5).unwrap();
    let h5 = ln_delta_histogram(&p, 5, 20_000, 20, 5).unwrap();
    assert!(h3.max > h3.min);
    assert!(h5.std_dev > h3.std_dev);
    assert_eq!(h5.histogram.iter().sum::<usize>(), 20_000);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn j_squared_at_random_points(v in prop::collection::vec(-0.5f64..0.5, 6), theta in -2.0f64..2.0) {
        let params = Arc::new(MeasureParams::geometric(1.5, 4).unwrap());
        let mut it = v.into_iter();
        let x = UnipotentMatrix::from_fn(4, |_| it.next().unwrap());
        let f = TransformedFunction::new(params, 4, StateFunction::plane_wave(1, 3, theta)).unwrap();
        let jj = f.clone().apply_j().unwrap().apply_j().unwrap();
        prop_assert!(relative_deviation(jj.eval(&x), f.eval(&x)) < 1e-12);
    }

    #[test]
    fn delta_flow_has_unit_modulus(v in prop::collection::vec(-0.5f64..0.5, 6), s in -5.0f64..5.0) {
        let params = Arc::new(MeasureParams::geometric(1.5, 4).unwrap());
        let mut it = v.into_iter();
        let x = UnipotentMatrix::from_fn(4, |_| it.next().unwrap());
        let one = StateFunction::constant(Complex64::new(1.0, 0.0));
        let f = TransformedFunction::new(params, 4, one).unwrap().apply_delta_pow(Complex64::new(0.0, s)).unwrap();
        prop_assert!((f.eval(&x).norm() - 1.0).abs() < 1e-12);
    }
}
