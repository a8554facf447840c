//! The four subcommands, each producing a [`Report`].

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde_json::json;
use unipotent_core::group::TriangularIndex;
use unipotent_core::measure::{self, series_e, Regime, SeriesVerdict, Verdict};
use unipotent_core::representation::{
    battery, check_commutator_exponent, check_conjugation_lemma, check_delta_forms, check_group_commutator,
    check_j_involution, check_jtj, check_left_right_commute, check_nested_commutator, check_s_factorization,
    check_tl_homomorphism, check_tr_homomorphism, check_unitarity, ln_delta_histogram, mc_inner, uniform_parameters,
    CheckContext, Operator, Point, PointwiseReport, StateFunction,
};
use unipotent_core::symbolic::ladder::expected_schedule;
use unipotent_core::symbolic::lemmas::{
    check_chain_bounds, check_d_inverse_lemma, check_delta_relations, check_generator_convention,
    check_inverse_formulas, nested_bracket_sign, translated_w_lemma, verify_ar_ln_delta, verify_ar_w_lemma,
};
use unipotent_core::symbolic::{ladder_with_order, LadderOrder, LadderReport};
use unipotent_core::{MeasureError, RepresentationError, SymbolicError};

use crate::config::{ConfigError, RunConfig};
use crate::report::{ConventionFlag, Report, Status};

/// Relative tolerance for the commutator exponent computed three ways.
pub const EXPONENT_TOL: f64 = 1e-10;
const RANDOM_ELEMENTS: usize = 20;
const PAIRS: usize = 10;
const HISTOGRAM_BINS: usize = 20;

fn config_value(cfg: &RunConfig) -> serde_json::Value {
    serde_json::to_value(cfg).expect("serializable")
}

fn measure_failure(e: MeasureError) -> ConfigError {
    ConfigError::Measure(e)
}

fn representation_failure(e: RepresentationError) -> ConfigError {
    match e {
        RepresentationError::Measure(m) => ConfigError::Measure(m),
        other => ConfigError::Invalid(other.to_string()),
    }
}

fn group_failure(e: unipotent_core::GroupError) -> ConfigError {
    ConfigError::Invalid(e.to_string())
}

fn names(coords: &[TriangularIndex]) -> Vec<String> {
    coords.iter().map(|i| format!("x{i}")).collect()
}

pub fn verify_symbolic(cfg: &RunConfig) -> Result<Report, ConfigError> {
    let n = cfg.n;
    if n > cfg.symbolic_cap {
        return Err(SymbolicError::SizeCap {
            size: n,
            cap: cfg.symbolic_cap,
        }
        .into());
    }
    let mut r = Report::new("verify-symbolic", config_value(cfg));

    let inverse = check_inverse_formulas(n);
    let bad: Vec<String> = inverse
        .iter()
        .filter(|c| !c.holds())
        .map(|c| format!("x^-1_{}", c.index))
        .collect();
    r.check(
        "inverse-formulas",
        "x^{-1}_kn = -x_kn - sum_{k<r<n} x_kr x^{-1}_rn = alternating sum over chains k < i_1 < ... < i_r < n, \
         equal to the matrix inverse and depending only on x_ij with k <= i < j <= n",
        bad.is_empty(),
        json!({ "entries": inverse.len(), "failures": bad }),
    );

    let delta = check_delta_relations(n);
    let bad: Vec<String> = delta
        .iter()
        .filter(|c| !(c.right_inverse && c.left_inverse))
        .map(|c| format!("({},{})", c.k, c.n))
        .collect();
    r.check(
        "delta-relations",
        "sum_{r=k}^{n} x_kr x^{-1}_rn = δ_kn = sum_{r=k}^{n} x^{-1}_kr x_rn",
        bad.is_empty(),
        json!({ "pairs": delta.len(), "failures": bad }),
    );

    let d_inverse = check_d_inverse_lemma(n);
    let bad: Vec<String> = d_inverse
        .iter()
        .filter(|c| !c.holds)
        .map(|c| format!("D{} x^-1_{}", c.derivative, c.index))
        .collect();
    r.check(
        "d-inverse",
        "[D_pq, x^{-1}_kn] = -x^{-1}_kp x^{-1}_qn for k <= p < q <= n, and 0 otherwise",
        bad.is_empty(),
        json!({
            "cases": d_inverse.len(),
            "in_range": d_inverse.iter().filter(|c| c.in_range).count(),
            "failures": bad,
        }),
    );

    let ar_w = verify_ar_w_lemma(n);
    let bad: Vec<String> = ar_w
        .iter()
        .filter(|c| !c.holds)
        .map(|c| format!("m={} w{}: expected {}, got {}", c.m, c.index, c.expected, c.computed))
        .collect();
    r.check(
        "ar-w",
        "[A^R_{m,m+1}, w_kn] = 2 x_km x_{k,m+1} (n = m+1, k < m); 2 x^{-1}_mn x^{-1}_{m+1,n} (k = m, n >= m+2); \
         0 otherwise",
        bad.is_empty(),
        json!({ "cases": ar_w.len(), "failures": bad }),
    );

    let identities: Vec<_> = (1..n).map(|m| verify_ar_ln_delta(m, n)).collect();
    let signs: Vec<Option<i32>> = identities.iter().map(|b| b.sign).collect();
    let common = signs.first().copied().flatten();
    let consistent = signs.iter().all(|s| s.is_some() && *s == common);
    r.check(
        "ar-ln-delta",
        "[A^R_{m,m+1}, ln Δ] = ±(2 sum_{r<m} b_{r,m+1} x_rm x_{r,m+1} + 2 sum_{n>=m+2} b_mn x^{-1}_mn x^{-1}_{m+1,n}) \
         with one global sign",
        consistent,
        json!({
            "sign": common,
            "per_m": identities.iter().map(|b| json!({ "m": b.m, "sign": b.sign })).collect::<Vec<_>>(),
        }),
    );

    if n < 3 {
        r.push(
            "ladder",
            "iterated brackets of ln Δ extract every coordinate x_kn",
            Status::Pass,
            json!({ "coordinates": [] }),
            Some("vacuous at N = 2: every w_kn is zero".into()),
        );
    } else {
        let nested = nested_bracket_sign(n);
        r.check(
            "nested-bracket",
            "[A^R_13, [A^R_23, ln Δ]] = ±2 b_13 x_12",
            nested == common && nested.is_some(),
            json!({ "sign": nested }),
        );

        let translated = translated_w_lemma(n);
        let bad: Vec<String> = translated
            .iter()
            .filter(|c| !c.matches_resolved)
            .map(|c| format!("m={} w{}", c.m, c.index))
            .collect();
        r.check(
            "translated-w",
            "w_kn(x E_{m,m+1}(t)) - w_kn(x) = 2t x_km x_{k,m+1} + t^2 x_km^2 (n = m+1); \
             2t x^{-1}_mn x^{-1}_{m+1,n} - t^2 (x^{-1}_{m+1,n})^2 (k = m); 0 otherwise",
            bad.is_empty(),
            json!({ "cases": translated.len(), "failures": bad }),
        );

        check_ladder(&mut r, n)?;
    }

    add_convention_flags(&mut r, n)?;
    Ok(r)
}

fn check_ladder(r: &mut Report, n: usize) -> Result<(), ConfigError> {
    let stated = ladder_with_order(n, LadderOrder::Stated)?;
    let schedule = ladder_with_order(n, LadderOrder::Schedule)?;
    let expected = expected_schedule(n, LadderOrder::Stated);
    let got = stated.coordinates();
    let mut all = stated.all_coordinates();
    let total = all.len();
    all.sort();
    all.dedup();
    let complete = all.len() == total && all == TriangularIndex::all(n).collect::<Vec<_>>();
    let single_term = stated
        .schedule
        .iter()
        .chain(std::iter::once(&stated.boundary))
        .all(|e| e.prefactor == format!("{}*b{}", 2 * e.sign, e.weight));
    r.check(
        "ladder",
        "for m = 2..N-1, [A^R_{m-s,m-s+1}, ..., [A^R_{m,m+1}, ln Δ]] = ±2 b_{m-s,m+1} x_{m-s,m+1} + known terms, \
         in the order x_12, x_13; x_14, x_24, x_23; then x_{1,m+1}, ..., x_{m-2,m+1}, x_{m-1,m}, x_{m-1,m+1}",
        got == expected && complete && single_term && stated.levels_match,
        json!({
            "order": names(&got),
            "expected": names(&expected),
            "boundary": format!("x{}", stated.boundary.coordinate),
            "every_coordinate_once": complete,
            "sign": stated.sign,
        }),
    );
    r.data("ladder", ladder_trace(&stated));
    r.data("ladder_schedule_order", ladder_trace(&schedule));
    Ok(())
}

fn ladder_trace(l: &LadderReport) -> serde_json::Value {
    let steps: Vec<_> = l
        .schedule
        .iter()
        .chain(std::iter::once(&l.boundary))
        .map(|e| {
            json!({
                "step": e.step,
                "coordinate": format!("x{}", e.coordinate),
                "generators": e.generators.iter().map(|g| format!("A{g}")).collect::<Vec<_>>(),
                "prefactor": e.prefactor,
            })
        })
        .collect();
    json!({ "size": l.size, "order": l.order, "sign": l.sign, "steps": steps })
}

/// Flags for the four conventions resolved by computation, evaluated at a
/// size where each one is visible.
fn add_convention_flags(r: &mut Report, n: usize) -> Result<(), ConfigError> {
    let size = n.clamp(4, 6);

    let generators = check_generator_convention(size);
    let printed_fail = generators.iter().filter(|c| !c.as_printed_matches).count();
    let upper_ok = generators.iter().all(|c| c.upper_index_matches);
    r.flag(ConventionFlag {
        id: "generator-index".into(),
        anchor: "A^R_kn = sum_{r=1}^{k-1} x_kr D_rn + D_kn".into(),
        stated: "coefficient x_kr".into(),
        resolved: "A^R_kn = sum_{r<k} x_rk D_rn + D_kn".into(),
        evidence: format!(
            "at N={size} the x_rk form equals d/dt f(x E_kn(t)) at t=0 for {} of {} generators; \
             the x_kr form fails for {printed_fail}",
            if upper_ok {
                generators.len()
            } else {
                generators.iter().filter(|c| c.upper_index_matches).count()
            },
            generators.len()
        ),
    });

    let nested = nested_bracket_sign(size);
    let per_m: Vec<Option<i32>> = (1..size).map(|m| verify_ar_ln_delta(m, size).sign).collect();
    r.flag(ConventionFlag {
        id: "bracket-sign".into(),
        anchor: "[A^R_13, [A^R_23, ln Δ]] = 2 b_13 x_12".into(),
        stated: "+2 b_13 x_12".into(),
        resolved: format!(
            "{}2 b_13 x_12; every [A^R_{{m,m+1}}, ln Δ] carries the same global sign",
            if nested == Some(-1) { "-" } else { "+" }
        ),
        evidence: format!("at N={size}: nested bracket sign {nested:?}, [A^R_{{m,m+1}}, ln Δ] signs {per_m:?}"),
    });

    let translated = translated_w_lemma(size);
    let relevant: Vec<_> = translated
        .iter()
        .filter(|c| c.index.n == c.m + 1 && c.index.k < c.m)
        .collect();
    r.flag(ConventionFlag {
        id: "t-squared-coefficient".into(),
        anchor: "w_kn(x E_{m,m+1}(t)) - w_kn(x) = 2t x_km x_{k,m+1} + t^2 x_{k,m+1}^2 (n = m+1)".into(),
        stated: "t^2 x_{k,m+1}^2".into(),
        resolved: "t^2 x_km^2".into(),
        evidence: format!(
            "at N={size}, of {} cases with n = m+1: resolved form exact in {}, stated form exact in {}",
            relevant.len(),
            relevant.iter().filter(|c| c.matches_resolved).count(),
            relevant.iter().filter(|c| c.matches_as_printed).count()
        ),
    });

    let chains = check_chain_bounds(size);
    r.flag(ConventionFlag {
        id: "chain-bounds".into(),
        anchor: "x^{-1}_kn = sum_r (-1)^r sum_{k <= i_1 < ... < i_r <= n} x_{k i_1} ... x_{i_r n}".into(),
        stated: "k <= i_1 and i_r <= n".into(),
        resolved: "k < i_1 < ... < i_r < n".into(),
        evidence: format!(
            "at N={size}, of {} entries: strict bounds match the inverse in {}, inclusive bounds in {}",
            chains.len(),
            chains.iter().filter(|c| c.strict_matches).count(),
            chains.iter().filter(|c| c.inclusive_matches).count()
        ),
    });

    if n >= 4 {
        r.flag(ConventionFlag {
            id: "ladder-order".into(),
            anchor: "order of extraction at m = 3".into(),
            stated: "text: x_14, x_24, x_23; display: x_14, x_23, x_24".into(),
            resolved: "text order used; both orders reduce to single-term prefactors".into(),
            evidence: format!(
                "m=3 stated order {:?}, display order {:?}",
                names(&expected_schedule(4, LadderOrder::Stated)[2..5]),
                names(&expected_schedule(4, LadderOrder::Schedule)[2..5])
            ),
        });
    }
    if n >= 3 {
        let l = ladder_with_order(n, LadderOrder::Stated)?;
        r.flag(ConventionFlag {
            id: "ladder-boundary".into(),
            anchor: "steps m = 2..N-1 extract x_{r,m+1} and x_{m-1,m}".into(),
            stated: format!("x_{} is not reached by steps m <= N-1", l.boundary.coordinate),
            resolved: format!(
                "x{} from [A^R_{}, [A^R_{}, ln Δ]] = {} x{}",
                l.boundary.coordinate,
                l.boundary.generators[0],
                l.boundary.generators[1],
                l.boundary.prefactor,
                l.boundary.coordinate
            ),
            evidence: "exact symbolic reduction".into(),
        });
    }
    Ok(())
}

fn verdict_summary(v: &SeriesVerdict) -> serde_json::Value {
    json!({
        "verdict": v.verdict,
        "terms": v.partial_sums.len(),
        "last_partial_sum": v.last(),
        "closed_form": v.closed_form,
        "tail_bound": v.tail_bound,
        "ln_tail_bound": v.ln_tail_bound,
        "notes": v.notes,
    })
}

pub fn classify(cfg: &RunConfig) -> Result<Report, ConfigError> {
    let mut r = Report::new("classify", config_value(cfg));
    let window = cfg.window.max(cfg.e_window);
    let params = cfg.measure(window)?;
    let mut ccfg = cfg.classify();
    if let measure::Family::Explicit { weights } = params.family() {
        let limit = weights.keys().map(|i| i.n).max().unwrap_or(2);
        ccfg.window = ccfg.window.min(limit);
        ccfg.e_window = ccfg.e_window.min(limit);
    }
    let report = measure::classify(&params, &ccfg).map_err(measure_failure)?;

    r.push(
        "regime",
        "all S^L_kn diverge: type I∞; all S^L_kn and E(b) converge and all S^{R,L}_kn diverge: type III₁",
        Status::Pass,
        report.regime.to_string(),
        Some(report.family.clone()),
    );

    let monotone = |m: &BTreeMap<String, SeriesVerdict>| m.values().all(SeriesVerdict::is_monotone);
    r.check(
        "series-monotone",
        "partial sums of S^L_kn, E(b) and S^{R,L}_kn are nondecreasing",
        monotone(&report.sl) && monotone(&report.srl) && report.e.is_monotone(),
        json!({ "indices": report.sl.len() }),
    );

    let closed: Vec<_> = report
        .sl
        .iter()
        .filter_map(|(k, v)| v.closed_form.map(|c| (k, c, (v.last() - c).abs())))
        .collect();
    if !closed.is_empty() {
        let worst = closed.iter().map(|c| c.2).fold(0.0, f64::max);
        r.check(
            "sl-closed-form",
            "S^L_kn = sum_{m>n} (a_k/a_n)^m = (a_k/a_n)^{n+1} / (1 - a_k/a_n)",
            worst <= cfg.tol_series,
            json!({ "indices": closed.len(), "max_abs_error": worst }),
        );
    }

    if report.e.verdict.converges() {
        let doubled =
            series_e(&cfg.measure(2 * ccfg.e_window)?, 2 * ccfg.e_window, &ccfg.series).map_err(measure_failure)?;
        let change = (doubled.estimate() - report.e.estimate()).abs();
        let bound = report.e.tail_bound.unwrap_or(0.0);
        r.check(
            "e-stability",
            "E(b) = sum_{k<n} S^L_kn / b_kn changes by at most its tail bound when the window doubles",
            change <= bound,
            json!({ "window": ccfg.e_window, "estimate": report.e.estimate(), "change": change, "tail_bound": bound }),
        );
    }

    if report.regime == Regime::TypeIIIOne {
        let witness = report.srl.values().all(|v| {
            matches!(
                v.verdict,
                Verdict::Diverges {
                    crossed_at: Some(_),
                    ..
                }
            ) && v.last() > cfg.threshold
        });
        r.check(
            "srl-divergence",
            "S^{R,L}_kn = sum_{m>n} b_km / S^L_nm, terms s^{(m+k-n)m} (s^{m-n} - 1)",
            witness,
            json!({ "threshold": cfg.threshold, "indices": report.srl.len() }),
        );
    }

    r.data("regime", report.regime.to_string());
    r.data("family", &report.family);
    r.data(
        "sl",
        report
            .sl
            .iter()
            .map(|(k, v)| (k.clone(), verdict_summary(v)))
            .collect::<BTreeMap<_, _>>(),
    );
    r.data(
        "srl",
        report
            .srl
            .iter()
            .map(|(k, v)| (k.clone(), verdict_summary(v)))
            .collect::<BTreeMap<_, _>>(),
    );
    r.data("e", verdict_summary(&report.e));
    Ok(r)
}

fn pointwise(r: &mut Report, id: &str, rep: &PointwiseReport, tol: f64) {
    r.check(
        id,
        &rep.name,
        rep.passes(tol),
        json!({ "max_deviation": rep.max_deviation, "evaluations": rep.evaluations, "tolerance": tol }),
    );
}

pub fn check_representation(cfg: &RunConfig) -> Result<Report, ConfigError> {
    if cfg.samples < 2 {
        return Err(ConfigError::Invalid(format!(
            "samples must be at least 2, got {}",
            cfg.samples
        )));
    }
    if cfg.points == 0 {
        return Err(ConfigError::Invalid("points must be positive".into()));
    }
    let n = cfg.n;
    let mut r = Report::new("check-representation", config_value(cfg));
    let ctx = CheckContext::sampled(cfg.measure(n)?, n, cfg.points, cfg.seed).map_err(representation_failure)?;
    let tol = cfg.tol_pointwise;
    let elements = |count: usize, stream: u64| -> Result<Vec<Point>, ConfigError> {
        ctx.random_elements(count, cfg.seed.wrapping_add(stream))
            .map_err(representation_failure)
    };
    let pairs = |stream: u64| -> Result<Vec<(Point, Point)>, ConfigError> {
        let e = elements(2 * PAIRS, stream)?;
        Ok(e.chunks(2).map(|c| (c[0].clone(), c[1].clone())).collect())
    };

    pointwise(&mut r, "j-involution", &check_j_involution(&ctx), tol);
    pointwise(&mut r, "jtj", &check_jtj(&ctx, &elements(RANDOM_ELEMENTS, 1)?), tol);
    for (i, rep) in check_s_factorization(&ctx).iter().enumerate() {
        let id = ["s-factorization", "s-adjoint-s", "s-involution", "delta-half-powers"][i];
        pointwise(&mut r, id, rep, tol);
    }
    pointwise(&mut r, "tr-homomorphism", &check_tr_homomorphism(&ctx, &pairs(2)?), tol);
    pointwise(&mut r, "tl-homomorphism", &check_tl_homomorphism(&ctx, &pairs(3)?), tol);
    pointwise(
        &mut r,
        "left-right-commute",
        &check_left_right_commute(&ctx, &pairs(4)?),
        tol,
    );

    let multipliers = multiplier_functions(n);
    let cases: Vec<_> = elements(PAIRS, 5)?
        .into_iter()
        .enumerate()
        .map(|(i, t)| (multipliers[i % multipliers.len()].clone(), t))
        .collect();
    pointwise(&mut r, "conjugation-lemma", &check_conjugation_lemma(&ctx, &cases), tol);

    let ts = uniform_parameters(PAIRS, 1.0, cfg.seed.wrapping_add(6));
    let ss = uniform_parameters(PAIRS, 2.0, cfg.seed.wrapping_add(7));
    let ts_pairs: Vec<_> = ts.iter().copied().zip(ss.iter().copied()).collect();
    for m in 2..n {
        let rep = check_group_commutator(&ctx, m, &ts_pairs).map_err(group_failure)?;
        pointwise(&mut r, &format!("group-commutator-m{m}"), &rep, tol);
        let rep = check_commutator_exponent(&ctx, m, &ts).map_err(group_failure)?;
        pointwise(&mut r, &format!("commutator-exponent-m{m}"), &rep, EXPONENT_TOL);
    }
    if n >= 3 {
        let nested: Vec<_> = (0..PAIRS).map(|i| (ts[i], ts[(i + 1) % PAIRS], ss[i])).collect();
        let rep = check_nested_commutator(&ctx, &nested).map_err(group_failure)?;
        pointwise(&mut r, "nested-commutator", &rep, tol);
    }
    let rep = check_delta_forms(&ctx).map_err(representation_failure)?;
    pointwise(&mut r, "delta-forms", &rep, EXPONENT_TOL);

    statistical_checks(&mut r, cfg, &ctx)?;

    if n >= 3 {
        let hist = ln_delta_histogram(&ctx.params, n, cfg.samples.min(10_000), HISTOGRAM_BINS, cfg.seed)
            .map_err(representation_failure)?;
        r.data("ln_delta_histogram", hist);
        let translated = translated_w_lemma(n.min(5));
        r.flag(ConventionFlag {
            id: "t-squared-coefficient".into(),
            anchor: "w_kn(x E_{m,m+1}(t)) - w_kn(x) = 2t x_km x_{k,m+1} + t^2 x_{k,m+1}^2 (n = m+1)".into(),
            stated: "t^2 x_{k,m+1}^2".into(),
            resolved: "t^2 x_km^2".into(),
            evidence: format!(
                "group commutator closed forms use the resolved coefficient; symbolic check at N={}: {} of {} cases exact",
                n.min(5),
                translated.iter().filter(|c| c.matches_resolved).count(),
                translated.len()
            ),
        });
    }
    Ok(r)
}

fn multiplier_functions(n: usize) -> Vec<StateFunction> {
    let mut v = vec![StateFunction::coordinate(1, 2), StateFunction::coordinate(1, n)];
    if n >= 3 {
        v.push(StateFunction::coordinate(2, 3));
        v.push(StateFunction::plane_wave(1, 3, 0.4));
        v.push(StateFunction::coordinate(1, 2).product(&StateFunction::coordinate(n - 1, n)));
    }
    v
}

fn statistical_checks(r: &mut Report, cfg: &RunConfig, ctx: &CheckContext) -> Result<(), ConfigError> {
    let n = cfg.n;
    let params = &ctx.params;
    let points = measure::sample_many(params, n, cfg.samples, cfg.seed).map_err(measure_failure)?;
    let functions = battery(n);
    let t = ctx
        .random_elements(1, cfg.seed.wrapping_add(101))
        .map_err(representation_failure)?
        .remove(0);

    for (id, anchor, word) in [
        (
            "unitarity-right",
            "<T^R_t f, T^R_t f> = <f, f>",
            vec![Operator::Right(t.clone())],
        ),
        (
            "unitarity-left",
            "<T^L_t f, T^L_t f> = <f, f>",
            vec![Operator::Left(t.clone())],
        ),
        (
            "unitarity-delta-flow",
            "<Δ^{is} f, Δ^{is} f> = <f, f>",
            vec![Operator::DeltaPow(Complex64::new(0.0, 0.8))],
        ),
    ] {
        let checks = check_unitarity(params, n, &points, &functions, &word).map_err(representation_failure)?;
        let pass = checks.iter().all(|c| c.passes(cfg.tol_stat));
        let measured: Vec<_> = checks
            .iter()
            .map(|c| {
                json!({
                    "function": c.function,
                    "norm": c.norm.re,
                    "difference": c.difference.re,
                    "std_error": c.difference.std_error,
                })
            })
            .collect();
        r.check(
            id,
            anchor,
            pass,
            json!({ "sigmas": cfg.tol_stat, "functions": measured }),
        );
    }

    let mut worst = 0.0f64;
    let mut moments = Vec::new();
    for idx in TriangularIndex::all(n) {
        let mut sq = measure::CompensatedSum::default();
        points.iter().for_each(|x| sq.add(x.get(idx).powi(2)));
        let empirical = sq.value() / points.len() as f64;
        let expected = 0.5 / params.weight(idx);
        let rel = (empirical / expected - 1.0).abs();
        worst = worst.max(rel);
        moments.push(
            json!({ "index": idx.to_string(), "variance": empirical, "expected": expected, "relative_error": rel }),
        );
    }
    r.check(
        "sampler-moments",
        "E[x_kn^2] = 1/(2 b_kn) under μ_b",
        worst <= cfg.tol_moment,
        json!({ "max_relative_error": worst, "tolerance": cfg.tol_moment, "entries": moments }),
    );

    let one = StateFunction::constant(Complex64::new(1.0, 0.0));
    let x12 = StateFunction::coordinate(1, 2);
    let norm_one = mc_inner(params, n, &one, &one, cfg.samples, cfg.seed).map_err(representation_failure)?;
    let norm_x12 = mc_inner(params, n, &x12, &x12, cfg.samples, cfg.seed).map_err(representation_failure)?;
    let expected = 0.5 / params.weight(TriangularIndex { k: 1, n: 2 });
    r.check(
        "inner-products",
        "<1, 1> = 1 and <x_12, x_12> = 1/(2 b_12)",
        norm_one.within(Complex64::new(1.0, 0.0), cfg.tol_stat)
            && norm_x12.within(Complex64::new(expected, 0.0), cfg.tol_stat),
        json!({
            "one": { "estimate": norm_one.re, "std_error": norm_one.std_error },
            "x12": { "estimate": norm_x12.re, "std_error": norm_x12.std_error, "expected": expected },
        }),
    );
    Ok(())
}

/// Every subcommand in sequence; the symbolic part runs at `min(N, cap)`.
pub fn report(cfg: &RunConfig) -> Result<Report, ConfigError> {
    let mut r = Report::new("report", config_value(cfg));
    let symbolic_cfg = RunConfig {
        n: cfg.n.min(cfg.symbolic_cap),
        ..cfg.clone()
    };
    r.absorb(verify_symbolic(&symbolic_cfg)?);
    r.absorb(classify(cfg)?);
    r.absorb(check_representation(cfg)?);
    Ok(r)
}
