use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use proptest::prelude::*;
use unipotent_core::group::{TriangularIndex, UnipotentMatrix};
use unipotent_core::measure::{
    classify, delta_value, ln_delta, ln_rn_left, ln_rn_right, log_density, rn_right, sample, sample_many, series_e,
    series_sl, series_srl, ClassifyConfig, Family, MeasureParams, PolynomialDelta, Regime, SeriesConfig, Verdict,
};

fn geo(window: usize) -> MeasureParams {
    MeasureParams::geometric(2.0, window).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs())
}

#[test]
fn log_density_matches_exact_quadratic_form() {
    let p = geo(5);
    let mut seed = 11u64;
    for _ in 0..100 {
        let mut exact = BigRational::from_integer(0.into());
        let mut log_norm = 0.0;
        let x = UnipotentMatrix::from_fn(5, |idx| {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let num = ((seed >> 33) % 2001) as i64 - 1000;
            let v = BigRational::new(BigInt::from(num), BigInt::from(8000));
            let b = BigRational::from_integer(BigInt::from(2).pow((idx.k * idx.n) as u32));
            exact -= b * &v * &v;
            log_norm += 0.5 * ((idx.k * idx.n) as f64 * 2f64.ln() - std::f64::consts::PI.ln());
            v.to_f64().unwrap()
        });
        let expected = exact.to_f64().unwrap() + log_norm;
        assert!(rel(log_density(&p, &x).unwrap(), expected) < 1e-12);
    }
}

#[test]
fn sampler_second_moments() {
    let p = geo(4);
    let xs = sample_many(&p, 4, 1_000_000, 42).unwrap();
    let n = xs.len() as f64;
    let idx: Vec<_> = TriangularIndex::all(4).collect();
    for &i in &idx {
        let var = xs.iter().map(|x| x.get(i).powi(2)).sum::<f64>() / n;
        let expected = 1.0 / (2.0 * p.weight(i));
        assert!(rel(var, expected) < 0.01, "x{i}: {var} vs {expected}");
    }
    let (a, b) = (TriangularIndex { k: 1, n: 2 }, TriangularIndex { k: 1, n: 3 });
    let prods: Vec<f64> = xs.iter().map(|x| x.get(a) * x.get(b)).collect();
    let mean = prods.iter().sum::<f64>() / n;
    let sd = (prods.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    assert!(mean.abs() <= 3.0 * sd / n.sqrt());
}

#[test]
fn sample_is_reproducible() {
    let p = geo(4);
    assert_eq!(sample(&p, 4, 5).unwrap(), sample(&p, 4, 5).unwrap());
    assert!(sample(&p, 5, 5).is_err());
}

#[test]
fn cocycle_chain_rules() {
    for size in 2..=6 {
        let p = geo(6);
        let pts = sample_many(&p, size, 3 * 200, 100 + size as u64).unwrap();
        for c in pts.chunks(3) {
            let (x, t, s) = (&c[0], &c[1], &c[2]);
            let ts = t.multiply(s).unwrap();
            let lhs = ln_rn_right(&p, x, &ts).unwrap();
            let rhs = ln_rn_right(&p, &x.multiply(t).unwrap(), s).unwrap() + ln_rn_right(&p, x, t).unwrap();
            assert!(((lhs - rhs).exp() - 1.0).abs() < 1e-10, "N={size}");
            // x -> (ts)^{-1} x factors through t^{-1} x
            let lhs = ln_rn_left(&p, x, &ts).unwrap();
            let rhs = ln_rn_left(&p, &t.invert().multiply(x).unwrap(), s).unwrap() + ln_rn_left(&p, x, t).unwrap();
            assert!(((lhs - rhs).exp() - 1.0).abs() < 1e-10, "N={size}");
        }
    }
}

#[test]
fn delta_two_paths_agree() {
    for size in 3..=6 {
        let p = geo(6);
        let poly = PolynomialDelta::new(size);
        for x in sample_many(&p, size, 200, 7).unwrap() {
            let a = ln_delta(&p, &x).unwrap();
            let b = poly.ln_delta(&p, &x).unwrap();
            assert!(((a - b).exp() - 1.0).abs() < 1e-10, "N={size}: {a} vs {b}");
            let inv = delta_value(&p, &x.invert()).unwrap();
            assert!((delta_value(&p, &x).unwrap() * inv - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn rn_right_identity_and_two_by_two() {
    let p = geo(3);
    let x = sample(&p, 3, 1).unwrap();
    assert_eq!(rn_right(&p, &x, &UnipotentMatrix::identity(3)).unwrap(), 1.0);
}

#[test]
fn sl_example_and_tail_bounds() {
    let p = geo(6);
    let cfg = SeriesConfig::default();
    let v = series_sl(&p, 1, 2, &cfg).unwrap();
    assert!((v.partial_sums[49] - 0.25).abs() < 1e-12);
    for idx in TriangularIndex::all(6) {
        let v = series_sl(&p, idx.k, idx.n, &cfg).unwrap();
        let limit = v.closed_form.unwrap();
        assert!(v.is_monotone());
        assert!(limit - v.last() <= v.tail_bound.unwrap() + 1e-15 * limit, "{idx}");
        assert!(v.verdict.converges());
    }
}

#[test]
fn e_is_stable_under_window_doubling() {
    let p = geo(80);
    let cfg = SeriesConfig::default();
    let e20 = series_e(&p, 20, &cfg).unwrap();
    let e40 = series_e(&p, 40, &cfg).unwrap();
    let e80 = series_e(&p, 80, &cfg).unwrap();
    assert!(e40.verdict.converges());
    assert!(e40.tail_bound.unwrap() < 1e-10);
    assert!((e40.estimate() - e20.estimate()).abs() < 1e-10);
    assert!((e80.estimate() - e40.estimate()).abs() <= e40.tail_bound.unwrap());
    assert!(e40.is_monotone());
    // the bound is far below f64 range
    assert!(e40.ln_tail_bound.unwrap() < -1000.0);
}

#[test]
fn e_diverges_for_constant_weights() {
    let p = MeasureParams::new(Family::Constant { value: 1.0 }, 10).unwrap();
    assert!(series_e(&p, 10, &SeriesConfig::default()).unwrap().verdict.diverges());
}

#[test]
fn srl_crosses_threshold_everywhere_in_window_six() {
    let p = geo(6);
    let cfg = SeriesConfig::default();
    for idx in TriangularIndex::all(6) {
        let v = series_srl(&p, idx.k, idx.n, &cfg).unwrap();
        assert!(v.last() > 1e9, "{idx}");
        assert!(matches!(
            v.verdict,
            Verdict::Diverges {
                crossed_at: Some(_),
                term_lower_bound: Some(_)
            }
        ));
    }
}

#[test]
fn srl_term_form_equals_definition() {
    // the definition b_km / S^L_nm through the generic path
    let generic = MeasureParams::new(
        Family::RowPower {
            s: 2.0,
            overrides: Default::default(),
        },
        6,
    )
    .unwrap();
    let cfg = SeriesConfig {
        threshold: 1e300,
        ..SeriesConfig::default()
    };
    for idx in TriangularIndex::all(5) {
        let a = series_srl(&geo(6), idx.k, idx.n, &cfg).unwrap();
        let b = series_srl(&generic, idx.k, idx.n, &cfg).unwrap();
        for (x, y) in a.partial_sums.iter().zip(&b.partial_sums).take(4) {
            assert!(rel(*x, *y) < 1e-12, "{idx}: {x} vs {y}");
        }
        let (k, n) = (idx.k as i32, idx.n as i32);
        let a_ = |j: i32| 2f64.powi(j);
        let first = (a_(k) * a_(n + 1) / a_(n)).powi(n + 1) * (a_(n + 1) / a_(n) - 1.0);
        assert_eq!(a.partial_sums[0], first);
    }
}

#[test]
fn classification_examples() {
    let cfg = ClassifyConfig::default();
    assert_eq!(classify(&geo(6), &cfg).unwrap().regime, Regime::TypeIIIOne);
    let one = MeasureParams::new(Family::Constant { value: 1.0 }, 6).unwrap();
    assert_eq!(classify(&one, &cfg).unwrap().regime, Regime::TypeIInfinity);
    let spliced = MeasureParams::new(Family::spliced(2.0, 3, 2.0), 6).unwrap();
    let r = classify(&spliced, &cfg).unwrap();
    assert_eq!(r.regime, Regime::Mixed);
    assert!(r.sl["12"].verdict.converges() && r.sl["13"].verdict.diverges());
    assert_eq!(Regime::TypeIIIOne.to_string(), "type III₁ factor regime");
}

proptest! {
    #[test]
    fn series_partial_sums_are_monotone(s in 1.05f64..4.0, k in 1usize..5, gap in 1usize..4) {
        let p = MeasureParams::geometric(s, 12).unwrap();
        let cfg = SeriesConfig { max_terms: 60, ..SeriesConfig::default() };
        let n = k + gap;
        prop_assert!(series_sl(&p, k, n, &cfg).unwrap().is_monotone());
        prop_assert!(series_srl(&p, k, n, &cfg).unwrap().is_monotone());
        prop_assert!(series_e(&p, 10, &cfg).unwrap().is_monotone());
    }

    #[test]
    fn geometric_weights_are_exact_powers(s in 1.01f64..3.0, k in 1usize..6, gap in 1usize..6) {
        let p = MeasureParams::geometric(s, 12).unwrap();
        let idx = TriangularIndex { k, n: k + gap };
        prop_assert!(rel(p.weight(idx), s.powi(k as i32).powi((k + gap) as i32)) < 1e-13);
    }
}
