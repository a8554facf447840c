//! Right and left regular representations on `L^2(B(N), μ_b)`, the modular
//! operators `J`, `Δ^σ`, `S`, `S*`, and pointwise or Monte Carlo checks of
//! the identities they satisfy.
//!
//! Operators are never discretized. A [`TransformedFunction`] is a base
//! function plus a list of operators and is evaluated at one point at a time.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{GroupError, RepresentationError};
use crate::group::{TriangularIndex, UnipotentMatrix};
use crate::measure::{self, CompensatedSum, MeasureParams, PolynomialDelta};
use crate::symbolic::formulas::{elementary_symbolic, ln_delta_poly, substitute_right};
use crate::symbolic::lemmas::translated_w_closed_form;
use crate::symbolic::poly::Variable;
use crate::symbolic::InverseTable;

pub type Point = UnipotentMatrix<f64>;
pub type Evaluator = Arc<dyn Fn(&Point) -> Complex64 + Send + Sync>;

/// Magnitudes below this are compared absolutely in [`relative_deviation`].
pub const DEVIATION_FLOOR: f64 = 1e-3;

/// `|a - b| / max(|a|, |b|, DEVIATION_FLOOR)`.
pub fn relative_deviation(a: Complex64, b: Complex64) -> f64 {
    let d = (a - b).norm();
    if d == 0.0 {
        return 0.0;
    }
    d / a.norm().max(b.norm()).max(DEVIATION_FLOOR)
}

#[derive(Clone)]
pub struct StateFunction {
    label: String,
    eval: Evaluator,
}

impl StateFunction {
    pub fn new(label: impl Into<String>, eval: impl Fn(&Point) -> Complex64 + Send + Sync + 'static) -> Self {
        StateFunction {
            label: label.into(),
            eval: Arc::new(eval),
        }
    }

    pub fn constant(c: Complex64) -> Self {
        StateFunction::new(format!("{c}"), move |_| c)
    }

    pub fn coordinate(k: usize, n: usize) -> Self {
        let idx = TriangularIndex { k, n };
        StateFunction::new(format!("x{idx}"), move |x| Complex64::new(*x.get(idx), 0.0))
    }

    /// `exp(i θ x_kn)`.
    pub fn plane_wave(k: usize, n: usize, theta: f64) -> Self {
        let idx = TriangularIndex { k, n };
        StateFunction::new(format!("exp(i*{theta}*x{idx})"), move |x| {
            Complex64::new(0.0, theta * *x.get(idx)).exp()
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, x: &Point) -> Complex64 {
        (self.eval)(x)
    }

    pub fn product(&self, other: &StateFunction) -> StateFunction {
        let (a, b) = (self.clone(), other.clone());
        StateFunction::new(format!("{}*{}", self.label, other.label), move |x| {
            a.eval(x) * b.eval(x)
        })
    }

    pub fn scale(&self, c: Complex64) -> StateFunction {
        let a = self.clone();
        StateFunction::new(format!("{c}*{}", self.label), move |x| c * a.eval(x))
    }

    pub fn reciprocal(&self) -> StateFunction {
        let a = self.clone();
        StateFunction::new(format!("1/{}", self.label), move |x| a.eval(x).inv())
    }
}

impl fmt::Debug for StateFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StateFunction({})", self.label)
    }
}

/// `1, x12, x23, x12*x13, exp(1.3 i x24)` on `B(size)`, with smaller
/// coordinates standing in below `size = 4`.
pub fn battery(size: usize) -> Vec<StateFunction> {
    assert!(size >= 2, "battery needs size >= 2");
    let last = |k: usize, n: usize| if n <= size { (k, n) } else { (1, size) };
    let (a, b) = last(2, 3);
    let (c, d) = last(1, 3);
    let (e, g) = last(2, 4);
    vec![
        StateFunction::constant(Complex64::new(1.0, 0.0)),
        StateFunction::coordinate(1, 2),
        StateFunction::coordinate(a, b),
        StateFunction::coordinate(1, 2).product(&StateFunction::coordinate(c, d)),
        StateFunction::plane_wave(e, g, 1.3),
    ]
}

#[derive(Debug, Clone)]
pub enum Operator {
    /// `(T^R_t f)(x) = (dμ(xt)/dμ(x))^{1/2} f(xt)`.
    Right(Point),
    /// `(T^L_s f)(x) = (dμ(s^{-1}x)/dμ(x))^{1/2} f(s^{-1}x)`.
    Left(Point),
    /// `(J f)(x) = Δ(x)^{-1/2} conj f(x^{-1})`.
    J,
    /// `(Δ^σ f)(x) = Δ(x)^σ f(x)`.
    DeltaPow(Complex64),
    Multiply(StateFunction),
    /// `(S f)(x) = Δ(x)^{-1} conj f(x^{-1})`.
    S,
    /// `(S* g)(x) = conj g(x^{-1})`.
    SAdjoint,
}

impl Operator {
    pub fn inverse(&self) -> Operator {
        match self {
            Operator::Right(t) => Operator::Right(t.invert()),
            Operator::Left(s) => Operator::Left(s.invert()),
            Operator::J => Operator::J,
            Operator::DeltaPow(s) => Operator::DeltaPow(-s),
            Operator::Multiply(g) => Operator::Multiply(g.reciprocal()),
            Operator::S => Operator::S,
            Operator::SAdjoint => Operator::SAdjoint,
        }
    }

    fn point(&self) -> Option<&Point> {
        match self {
            Operator::Right(t) | Operator::Left(t) => Some(t),
            _ => None,
        }
    }
}

/// Inverse of the composite that applies `word[0]` first.
pub fn inverse_word(word: &[Operator]) -> Vec<Operator> {
    word.iter().rev().map(Operator::inverse).collect()
}

/// The group commutator `a b a^{-1} b^{-1}` as an application list: `b^{-1}`
/// acts first, `a` last.
pub fn commutator_word(a: &[Operator], b: &[Operator]) -> Vec<Operator> {
    let mut out = inverse_word(b);
    out.extend(inverse_word(a));
    out.extend_from_slice(b);
    out.extend_from_slice(a);
    out
}

/// `base` followed by `pipeline`, where `pipeline[0]` is applied first.
#[derive(Debug, Clone)]
pub struct TransformedFunction {
    params: Arc<MeasureParams>,
    size: usize,
    base: StateFunction,
    pipeline: Vec<Operator>,
}

impl TransformedFunction {
    pub fn new(params: Arc<MeasureParams>, size: usize, base: StateFunction) -> Result<Self, RepresentationError> {
        if size > params.window() {
            return Err(crate::error::MeasureError::WindowTooSmall {
                window: params.window(),
                size,
            }
            .into());
        }
        Ok(TransformedFunction {
            params,
            size,
            base,
            pipeline: Vec::new(),
        })
    }

    pub fn pipeline(&self) -> &[Operator] {
        &self.pipeline
    }

    pub fn base(&self) -> &StateFunction {
        &self.base
    }

    pub fn then(mut self, op: Operator) -> Result<Self, RepresentationError> {
        if let Some(p) = op.point() {
            if p.size() != self.size {
                return Err(GroupError::SizeMismatch {
                    left: self.size,
                    right: p.size(),
                }
                .into());
            }
        }
        self.pipeline.push(op);
        Ok(self)
    }

    pub fn then_all(self, ops: &[Operator]) -> Result<Self, RepresentationError> {
        ops.iter().try_fold(self, |f, op| f.then(op.clone()))
    }

    pub fn apply_tr(self, t: &Point) -> Result<Self, RepresentationError> {
        self.then(Operator::Right(t.clone()))
    }

    pub fn apply_tl(self, s: &Point) -> Result<Self, RepresentationError> {
        self.then(Operator::Left(s.clone()))
    }

    pub fn apply_j(self) -> Result<Self, RepresentationError> {
        self.then(Operator::J)
    }

    pub fn apply_delta_pow(self, sigma: Complex64) -> Result<Self, RepresentationError> {
        self.then(Operator::DeltaPow(sigma))
    }

    fn ln_delta(&self, x: &Point) -> f64 {
        measure::ln_delta(&self.params, x).expect("size checked at construction")
    }

    fn ln_density(&self, x: &Point) -> f64 {
        measure::log_density(&self.params, x).expect("size checked at construction")
    }

    /// Walks the pipeline outermost first, carrying the point, the factor
    /// collected so far, and whether the remaining value is conjugated.
    pub fn eval(&self, x: &Point) -> Complex64 {
        let mut y = x.clone();
        let mut factor = Complex64::new(1.0, 0.0);
        let mut conjugated = false;
        let fold = |factor: &mut Complex64, conjugated: bool, a: Complex64| {
            *factor *= if conjugated { a.conj() } else { a };
        };
        for op in self.pipeline.iter().rev() {
            match op {
                Operator::Right(t) => {
                    let yt = y.multiply(t).expect("size checked");
                    let half = 0.5 * (self.ln_density(&yt) - self.ln_density(&y));
                    fold(&mut factor, conjugated, Complex64::new(half.exp(), 0.0));
                    y = yt;
                }
                Operator::Left(s) => {
                    let sy = s.invert().multiply(&y).expect("size checked");
                    let half = 0.5 * (self.ln_density(&sy) - self.ln_density(&y));
                    fold(&mut factor, conjugated, Complex64::new(half.exp(), 0.0));
                    y = sy;
                }
                Operator::J => {
                    let a = (-0.5 * self.ln_delta(&y)).exp();
                    fold(&mut factor, conjugated, Complex64::new(a, 0.0));
                    y = y.invert();
                    conjugated = !conjugated;
                }
                Operator::S => {
                    let a = (-self.ln_delta(&y)).exp();
                    fold(&mut factor, conjugated, Complex64::new(a, 0.0));
                    y = y.invert();
                    conjugated = !conjugated;
                }
                Operator::SAdjoint => {
                    y = y.invert();
                    conjugated = !conjugated;
                }
                Operator::DeltaPow(sigma) => {
                    let a = (sigma * self.ln_delta(&y)).exp();
                    fold(&mut factor, conjugated, a);
                }
                Operator::Multiply(g) => {
                    let a = g.eval(&y);
                    fold(&mut factor, conjugated, a);
                }
            }
        }
        let v = self.base.eval(&y);
        factor * if conjugated { v.conj() } else { v }
    }
}

/// Largest deviation of one identity over a set of evaluations.
#[derive(Debug, Clone, Serialize)]
pub struct PointwiseReport {
    pub name: String,
    pub evaluations: usize,
    pub max_deviation: f64,
}

impl PointwiseReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.max_deviation <= tol
    }

    fn merge(name: &str, parts: impl IntoIterator<Item = (usize, f64)>) -> Self {
        let (mut evaluations, mut max_deviation) = (0, 0.0f64);
        for (n, d) in parts {
            evaluations += n;
            max_deviation = max_deviation.max(d);
        }
        PointwiseReport {
            name: name.into(),
            evaluations,
            max_deviation,
        }
    }
}

/// Shared inputs of the pointwise checks.
#[derive(Debug, Clone)]
pub struct CheckContext {
    pub params: Arc<MeasureParams>,
    pub size: usize,
    pub points: Vec<Point>,
    pub functions: Vec<StateFunction>,
}

impl CheckContext {
    /// `count` points drawn from `μ_b` and the standard [`battery`].
    pub fn sampled(params: MeasureParams, size: usize, count: usize, seed: u64) -> Result<Self, RepresentationError> {
        let points = measure::sample_many(&params, size, count, seed)?;
        Ok(CheckContext {
            params: Arc::new(params),
            size,
            points,
            functions: battery(size),
        })
    }

    fn lift(&self, f: &StateFunction, ops: &[Operator]) -> TransformedFunction {
        TransformedFunction::new(self.params.clone(), self.size, f.clone())
            .and_then(|t| t.then_all(ops))
            .expect("operators built for this size")
    }

    /// Max deviation between two pipelines over every function and point.
    fn compare(&self, lhs: &[Operator], rhs: &[Operator]) -> (usize, f64) {
        self.compare_with(lhs, |f, x| self.lift(f, rhs).eval(x))
    }

    fn compare_with(&self, lhs: &[Operator], rhs: impl Fn(&StateFunction, &Point) -> Complex64 + Sync) -> (usize, f64) {
        let max = self
            .functions
            .iter()
            .map(|f| {
                let l = self.lift(f, lhs);
                self.points
                    .par_iter()
                    .map(|x| relative_deviation(l.eval(x), rhs(f, x)))
                    .reduce(|| 0.0, f64::max)
            })
            .fold(0.0, f64::max);
        (self.functions.len() * self.points.len(), max)
    }

    pub fn random_elements(&self, count: usize, seed: u64) -> Result<Vec<Point>, RepresentationError> {
        Ok(measure::sample_many(&self.params, self.size, count, seed)?)
    }
}

pub fn check_j_involution(ctx: &CheckContext) -> PointwiseReport {
    PointwiseReport::merge("J^2 = id", [ctx.compare(&[Operator::J, Operator::J], &[])])
}

/// `J T^R_t J = T^L_t`.
pub fn check_jtj(ctx: &CheckContext, ts: &[Point]) -> PointwiseReport {
    PointwiseReport::merge(
        "J T^R_t J = T^L_t",
        ts.iter().map(|t| {
            ctx.compare(
                &[Operator::J, Operator::Right(t.clone()), Operator::J],
                &[Operator::Left(t.clone())],
            )
        }),
    )
}

/// `T^R_t T^R_s = T^R_{ts}`.
pub fn check_tr_homomorphism(ctx: &CheckContext, pairs: &[(Point, Point)]) -> PointwiseReport {
    PointwiseReport::merge(
        "T^R_t T^R_s = T^R_{ts}",
        pairs.iter().map(|(t, s)| {
            let ts = t.multiply(s).expect("same size");
            ctx.compare(
                &[Operator::Right(s.clone()), Operator::Right(t.clone())],
                &[Operator::Right(ts)],
            )
        }),
    )
}

/// `T^L_s T^L_t = T^L_{st}`.
pub fn check_tl_homomorphism(ctx: &CheckContext, pairs: &[(Point, Point)]) -> PointwiseReport {
    PointwiseReport::merge(
        "T^L_s T^L_t = T^L_{st}",
        pairs.iter().map(|(s, t)| {
            let st = s.multiply(t).expect("same size");
            ctx.compare(
                &[Operator::Left(t.clone()), Operator::Left(s.clone())],
                &[Operator::Left(st)],
            )
        }),
    )
}

/// `T^L_s T^R_t = T^R_t T^L_s`.
pub fn check_left_right_commute(ctx: &CheckContext, pairs: &[(Point, Point)]) -> PointwiseReport {
    PointwiseReport::merge(
        "T^L_s T^R_t = T^R_t T^L_s",
        pairs.iter().map(|(s, t)| {
            let (l, r) = (Operator::Left(s.clone()), Operator::Right(t.clone()));
            ctx.compare(&[r.clone(), l.clone()], &[l, r])
        }),
    )
}

/// `S = J Δ^{1/2}`, `S* S = Δ` and `S^2 = id`.
pub fn check_s_factorization(ctx: &CheckContext) -> Vec<PointwiseReport> {
    let half = Operator::DeltaPow(Complex64::new(0.5, 0.0));
    let one = Operator::DeltaPow(Complex64::new(1.0, 0.0));
    vec![
        PointwiseReport::merge(
            "S = J Δ^{1/2}",
            [ctx.compare(&[Operator::S], &[half.clone(), Operator::J])],
        ),
        PointwiseReport::merge(
            "S* S = Δ",
            [ctx.compare(&[Operator::S, Operator::SAdjoint], std::slice::from_ref(&one))],
        ),
        PointwiseReport::merge("S S = id", [ctx.compare(&[Operator::S, Operator::S], &[])]),
        PointwiseReport::merge("Δ^{1/2} Δ^{1/2} = Δ", [ctx.compare(&[half.clone(), half], &[one])]),
    ]
}

/// `T^R_t g T^R_{t^{-1}} = g(xt)`.
pub fn check_conjugation_lemma(ctx: &CheckContext, pairs: &[(StateFunction, Point)]) -> PointwiseReport {
    PointwiseReport::merge(
        "T^R_t g T^R_{t^{-1}} = g(xt)",
        pairs.iter().map(|(g, t)| {
            let word = [
                Operator::Right(t.invert()),
                Operator::Multiply(g.clone()),
                Operator::Right(t.clone()),
            ];
            ctx.compare_with(&word, |f, x| g.eval(&x.multiply(t).expect("same size")) * f.eval(x))
        }),
    )
}

/// `{T_{m,m+1}(t), Δ^{is}}` as an application list.
pub fn delta_commutator_word(size: usize, m: usize, t: f64, s: f64) -> Result<Vec<Operator>, GroupError> {
    let e = UnipotentMatrix::elementary(size, m, m + 1, t)?;
    Ok(commutator_word(
        &[Operator::Right(e)],
        &[Operator::DeltaPow(Complex64::new(0.0, s))],
    ))
}

/// `sum b_kn (w_kn(x E_{m,m+1}(t)) - w_kn(x))` from the closed form of the
/// translated `w`, with the `t^2` term carried by `x_km^2`.
pub fn commutator_exponent_closed(params: &MeasureParams, x: &Point, m: usize, t: f64) -> f64 {
    let size = x.size();
    let inv = x.invert();
    let xe = |k: usize, n: usize| *x.get(TriangularIndex { k, n });
    let xi = |k: usize, n: usize| *inv.get(TriangularIndex { k, n });
    let b = |k: usize, n: usize| params.weight(TriangularIndex { k, n });
    let mut acc = CompensatedSum::default();
    for r in 1..m {
        acc.add(b(r, m + 1) * (2.0 * t * xe(r, m) * xe(r, m + 1) + t * t * xe(r, m).powi(2)));
    }
    for n in m + 2..=size {
        acc.add(b(m, n) * (2.0 * t * xi(m, n) * xi(m + 1, n) - t * t * xi(m + 1, n).powi(2)));
    }
    acc.value()
}

/// `{T_{m,m+1}(t), Δ^{is}}` against multiplication by
/// `exp(-is sum b (w(x E(t)) - w(x)))` for each `(t, s)`.
pub fn check_group_commutator(
    ctx: &CheckContext,
    m: usize,
    cases: &[(f64, f64)],
) -> Result<PointwiseReport, GroupError> {
    let mut parts = Vec::new();
    for &(t, s) in cases {
        let word = delta_commutator_word(ctx.size, m, t, s)?;
        parts.push(ctx.compare_with(&word, |f, x| {
            let e = commutator_exponent_closed(&ctx.params, x, m, t);
            Complex64::new(0.0, -s * e).exp() * f.eval(x)
        }));
    }
    Ok(PointwiseReport::merge(
        &format!("{{T_{m},{}(t), Δ^is}} closed form", m + 1),
        parts,
    ))
}

/// `{T_13(t2), {T_23(t1), Δ^{is}}} = exp(-is b_13 2 t1 t2 x12)` for each `(t1, t2, s)`.
pub fn check_nested_commutator(ctx: &CheckContext, cases: &[(f64, f64, f64)]) -> Result<PointwiseReport, GroupError> {
    let b13 = ctx.params.weight(TriangularIndex { k: 1, n: 3 });
    let mut parts = Vec::new();
    for &(t1, t2, s) in cases {
        let inner = delta_commutator_word(ctx.size, 2, t1, s)?;
        let outer = UnipotentMatrix::elementary(ctx.size, 1, 3, t2)?;
        let word = commutator_word(&[Operator::Right(outer)], &inner);
        parts.push(ctx.compare_with(&word, |f, x| {
            let x12 = *x.get(TriangularIndex { k: 1, n: 2 });
            Complex64::new(0.0, -s * b13 * 2.0 * t1 * t2 * x12).exp() * f.eval(x)
        }));
    }
    Ok(PointwiseReport::merge(
        "{T_13(t2), {T_23(t1), Δ^is}} = exp(-is b13 2 t1 t2 x12)",
        parts,
    ))
}

/// The exponent `ln Δ(x E_{m,m+1}(t)) - ln Δ(x)` by matrix inversion, by the
/// right-translated symbolic `ln Δ`, and by the translated-`w` closed form.
pub fn check_commutator_exponent(ctx: &CheckContext, m: usize, ts: &[f64]) -> Result<PointwiseReport, GroupError> {
    let size = ctx.size;
    let e = elementary_symbolic(size, m, m + 1, "t")?;
    let ln_delta = ln_delta_poly(size);
    let shifted = (&substitute_right(&ln_delta, &e)? - &ln_delta).compile();
    let table = InverseTable::new(size);
    let closed = TriangularIndex::all(size)
        .filter(|i| !i.is_superdiagonal())
        .fold(crate::symbolic::Polynomial::default(), |acc, i| {
            &acc - &(&crate::symbolic::Polynomial::weight(i.k, i.n) * &translated_w_closed_form(m, i, &table, false))
        })
        .compile();
    let params = &ctx.params;
    let mut max_dev = 0.0f64;
    for &t in ts {
        let em = UnipotentMatrix::elementary(size, m, m + 1, t)?;
        let devs: Vec<f64> = ctx
            .points
            .par_iter()
            .map(|x| {
                let vars = |v: Variable| match v {
                    Variable::Coord(i) => *x.get(i),
                    Variable::Weight(i) => params.weight(i),
                    Variable::Param(_) => t,
                };
                let numeric = measure::ln_delta(params, &x.multiply(&em).expect("same size")).expect("size")
                    - measure::ln_delta(params, x).expect("size");
                let re = |v: f64| Complex64::new(v, 0.0);
                relative_deviation(re(numeric), re(shifted.eval(vars)))
                    .max(relative_deviation(re(numeric), re(closed.eval(vars))))
                    .max(relative_deviation(
                        re(numeric),
                        re(-commutator_exponent_closed(params, x, m, t)),
                    ))
            })
            .collect();
        max_dev = devs.into_iter().fold(max_dev, f64::max);
    }
    Ok(PointwiseReport {
        name: format!("exponent of {{T_{m},{}(t), Δ^is}}: inversion vs symbolic", m + 1),
        evaluations: ts.len() * ctx.points.len(),
        max_deviation: max_dev,
    })
}

/// `ln Δ` by matrix inversion against the expanded `w` polynomials, and
/// `|Δ^{is}| = 1`.
pub fn check_delta_forms(ctx: &CheckContext) -> Result<PointwiseReport, RepresentationError> {
    let poly = PolynomialDelta::new(ctx.size);
    let mut max_dev = 0.0f64;
    for x in &ctx.points {
        let a = measure::ln_delta(&ctx.params, x)?;
        let b = poly.ln_delta(&ctx.params, x)?;
        let unit = (Complex64::new(0.0, 0.7) * a).exp().norm();
        max_dev = max_dev
            .max(relative_deviation(
                Complex64::new(a.exp(), 0.0),
                Complex64::new(b.exp(), 0.0),
            ))
            .max((unit - 1.0).abs());
    }
    Ok(PointwiseReport {
        name: "Δ by inversion = Δ by w polynomials".into(),
        evaluations: ctx.points.len(),
        max_deviation: max_dev,
    })
}

/// Monte Carlo estimate with its jackknife standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub re: f64,
    pub im: f64,
    pub std_error: f64,
    pub samples: usize,
}

impl McEstimate {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    pub fn within(&self, expected: Complex64, sigmas: f64) -> bool {
        (self.value() - expected).norm() <= sigmas * self.std_error
    }
}

/// Mean and leave-one-out jackknife standard error of `values`.
pub fn jackknife(values: &[Complex64]) -> Result<McEstimate, RepresentationError> {
    let n = values.len();
    if n < 2 {
        return Err(RepresentationError::TooFewSamples(n));
    }
    let (mut re, mut im) = (CompensatedSum::default(), CompensatedSum::default());
    for v in values {
        re.add(v.re);
        im.add(v.im);
    }
    let total = Complex64::new(re.value(), im.value());
    let nf = n as f64;
    let mean = total / nf;
    let mut spread = CompensatedSum::default();
    for v in values {
        let leave_out = (total - v) / (nf - 1.0);
        spread.add((leave_out - mean).norm_sqr());
    }
    Ok(McEstimate {
        re: mean.re,
        im: mean.im,
        std_error: ((nf - 1.0) / nf * spread.value()).sqrt(),
        samples: n,
    })
}

/// Evaluates `h` at each point in parallel, keeping the point order.
pub fn evaluate_at(points: &[Point], h: impl Fn(&Point) -> Complex64 + Sync + Send) -> Vec<Complex64> {
    points.par_iter().map(h).collect()
}

/// `<f, g> = ∫ conj(f) g dμ_b` from `nsamples` draws.
pub fn mc_inner(
    params: &MeasureParams,
    size: usize,
    f: &StateFunction,
    g: &StateFunction,
    nsamples: usize,
    seed: u64,
) -> Result<McEstimate, RepresentationError> {
    if nsamples < 2 {
        return Err(RepresentationError::TooFewSamples(nsamples));
    }
    let points = measure::sample_many(params, size, nsamples, seed)?;
    jackknife(&evaluate_at(&points, |x| f.eval(x).conj() * g.eval(x)))
}

/// `<T f, T f> - <f, f>` for one pipeline, estimated pointwise on shared draws.
#[derive(Debug, Clone, Serialize)]
pub struct UnitarityCheck {
    pub function: String,
    pub norm: McEstimate,
    pub transformed_norm: McEstimate,
    pub difference: McEstimate,
}

/// Relative rounding allowance for norm differences that vanish pointwise.
pub const ROUNDING_FLOOR: f64 = 1e-12;

impl UnitarityCheck {
    pub fn passes(&self, sigmas: f64) -> bool {
        self.difference.within(Complex64::new(0.0, 0.0), sigmas)
            || self.difference.value().norm() <= ROUNDING_FLOOR * self.norm.value().norm().max(1.0)
    }
}

pub fn check_unitarity(
    params: &Arc<MeasureParams>,
    size: usize,
    points: &[Point],
    functions: &[StateFunction],
    word: &[Operator],
) -> Result<Vec<UnitarityCheck>, RepresentationError> {
    functions
        .iter()
        .map(|f| {
            let tf = TransformedFunction::new(params.clone(), size, f.clone())?.then_all(word)?;
            let pairs: Vec<(f64, f64)> = points
                .par_iter()
                .map(|x| (f.eval(x).norm_sqr(), tf.eval(x).norm_sqr()))
                .collect();
            let re = |v: f64| Complex64::new(v, 0.0);
            Ok(UnitarityCheck {
                function: f.label().to_string(),
                norm: jackknife(&pairs.iter().map(|p| re(p.0)).collect::<Vec<_>>())?,
                transformed_norm: jackknife(&pairs.iter().map(|p| re(p.1)).collect::<Vec<_>>())?,
                difference: jackknife(&pairs.iter().map(|p| re(p.1 - p.0)).collect::<Vec<_>>())?,
            })
        })
        .collect()
}

/// Summary of `ln Δ` over draws from `μ_b`. Descriptive only.
#[derive(Debug, Clone, Serialize)]
pub struct LnDeltaSummary {
    pub size: usize,
    pub samples: usize,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub std_dev: f64,
    /// Equal-width bins over `[min, max]`.
    pub histogram: Vec<usize>,
}

pub fn ln_delta_histogram(
    params: &MeasureParams,
    size: usize,
    nsamples: usize,
    bins: usize,
    seed: u64,
) -> Result<LnDeltaSummary, RepresentationError> {
    if nsamples < 2 {
        return Err(RepresentationError::TooFewSamples(nsamples));
    }
    let points = measure::sample_many(params, size, nsamples, seed)?;
    let values: Vec<f64> = points
        .par_iter()
        .map(|x| measure::ln_delta(params, x))
        .collect::<Result<_, _>>()?;
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = CompensatedSum::default();
    values.iter().for_each(|v| sum.add(*v));
    let mean = sum.value() / nsamples as f64;
    let mut sq = CompensatedSum::default();
    values.iter().for_each(|v| sq.add((v - mean).powi(2)));
    let mut histogram = vec![0; bins.max(1)];
    let width = (max - min) / histogram.len() as f64;
    for v in &values {
        let i = if width > 0.0 { ((v - min) / width) as usize } else { 0 };
        histogram[i.min(bins.max(1) - 1)] += 1;
    }
    Ok(LnDeltaSummary {
        size,
        samples: nsamples,
        min,
        max,
        mean,
        std_dev: (sq.value() / (nsamples as f64 - 1.0)).sqrt(),
        histogram,
    })
}

/// Uniform reals in `[-scale, scale]` for translation and flow parameters.
pub fn uniform_parameters(count: usize, scale: f64, seed: u64) -> Vec<f64> {
    let mut rng = measure::stream_rng(seed, u64::MAX);
    (0..count).map(|_| rng.gen_range(-scale..=scale)).collect()
}

/// Deterministic labelled view of several reports.
pub fn by_name(reports: &[PointwiseReport]) -> BTreeMap<String, &PointwiseReport> {
    reports.iter().map(|r| (r.name.clone(), r)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(points: usize) -> CheckContext {
        CheckContext::sampled(MeasureParams::geometric(2.0, 4).unwrap(), 4, points, 7).unwrap()
    }

    #[test]
    fn empty_pipeline_is_the_base_function() {
        let c = ctx(20);
        let id = Point::identity(4);
        assert_eq!(c.compare(&[Operator::Right(id.clone())], &[]).1, 0.0);
        assert_eq!(c.compare(&[Operator::Left(id)], &[]).1, 0.0);
        assert_eq!(c.compare(&[Operator::DeltaPow(Complex64::new(0.0, 0.0))], &[]).1, 0.0);
    }

    #[test]
    fn j_of_constant_is_delta_power() {
        let c = ctx(50);
        let one = StateFunction::constant(Complex64::new(1.0, 0.0));
        for x in &c.points {
            let j = c.lift(&one, &[Operator::J]).eval(x);
            let expected = measure::delta_value(&c.params, x).unwrap().powf(-0.5);
            assert!(relative_deviation(j, Complex64::new(expected, 0.0)) < 1e-12);
            let s = c.lift(&one, &[Operator::S]).eval(x);
            assert!(relative_deviation(s, Complex64::new(expected * expected, 0.0)) < 1e-12);
        }
    }

    #[test]
    fn commutator_word_order() {
        let a = [Operator::J];
        let b = [Operator::DeltaPow(Complex64::new(0.0, 1.0))];
        let w = commutator_word(&a, &b);
        assert!(matches!(&w[0], Operator::DeltaPow(s) if s.im == -1.0));
        assert!(matches!(w[1], Operator::J));
        assert!(matches!(&w[2], Operator::DeltaPow(s) if s.im == 1.0));
        assert!(matches!(w[3], Operator::J));
    }

    #[test]
    fn conjugation_lemma_examples() {
        let c = ctx(30);
        let t = UnipotentMatrix::elementary(4, 2, 3, 0.6).unwrap();
        let one = StateFunction::constant(Complex64::new(1.0, 0.0));
        let word = |g: &StateFunction| {
            [
                Operator::Right(t.invert()),
                Operator::Multiply(g.clone()),
                Operator::Right(t.clone()),
            ]
        };
        for x in &c.points {
            let v12 = c.lift(&one, &word(&StateFunction::coordinate(1, 2))).eval(x);
            assert!((v12.re - x.get(TriangularIndex { k: 1, n: 2 })).abs() < 1e-12);
            let v13 = c.lift(&one, &word(&StateFunction::coordinate(1, 3))).eval(x);
            let expected = x.get(TriangularIndex { k: 1, n: 3 }) + 0.6 * x.get(TriangularIndex { k: 1, n: 2 });
            assert!((v13.re - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn trivial_commutator_parameters() {
        let c = ctx(30);
        let one = StateFunction::constant(Complex64::new(1.0, 0.0));
        for (t, s) in [(0.0, 1.0), (0.7, 0.0)] {
            let w = delta_commutator_word(4, 2, t, s).unwrap();
            for x in &c.points {
                assert!(relative_deviation(c.lift(&one, &w).eval(x), Complex64::new(1.0, 0.0)) < 1e-12);
            }
        }
    }

    #[test]
    fn mc_inner_basics() {
        let p = MeasureParams::geometric(2.0, 4).unwrap();
        let one = StateFunction::constant(Complex64::new(1.0, 0.0));
        let e = mc_inner(&p, 4, &one, &one, 100, 1).unwrap();
        assert_eq!((e.value(), e.std_error), (Complex64::new(1.0, 0.0), 0.0));
        let x12 = StateFunction::coordinate(1, 2);
        let e = mc_inner(&p, 4, &x12, &x12, 20000, 2).unwrap();
        assert!(e.within(Complex64::new(0.125, 0.0), 3.0), "{e:?}");
        let e = mc_inner(&p, 4, &x12, &StateFunction::coordinate(1, 3), 20000, 3).unwrap();
        assert!(e.within(Complex64::new(0.0, 0.0), 3.0), "{e:?}");
        assert_eq!(
            mc_inner(&p, 4, &one, &one, 1, 1).unwrap_err(),
            RepresentationError::TooFewSamples(1)
        );
    }

    #[test]
    fn jackknife_matches_sample_error_of_the_mean() {
        let v: Vec<Complex64> = (0..10).map(|i| Complex64::new(i as f64, 0.0)).collect();
        let e = jackknife(&v).unwrap();
        // sample variance 55/6, standard error sqrt(55/60)
        assert!((e.std_error - (55.0f64 / 60.0).sqrt()).abs() < 1e-12);
        assert_eq!(e.re, 4.5);
    }

    #[test]
    fn histogram_of_two_by_two_is_degenerate() {
        let p = MeasureParams::geometric(2.0, 5).unwrap();
        let h = ln_delta_histogram(&p, 2, 100, 4, 1).unwrap();
        assert_eq!((h.min, h.max), (0.0, 0.0));
        assert_eq!(h.histogram, vec![100, 0, 0, 0]);
        let h3 = ln_delta_histogram(&p, 3, 1000, 10, 1).unwrap();
        assert!(h3.max > h3.min);
    }

    #[test]
    fn size_mismatch_is_rejected() {
        let p = Arc::new(MeasureParams::geometric(2.0, 4).unwrap());
        let f = TransformedFunction::new(p.clone(), 4, StateFunction::coordinate(1, 2)).unwrap();
        assert!(f.apply_tr(&Point::identity(3)).is_err());
        assert!(TransformedFunction::new(p, 5, StateFunction::coordinate(1, 2)).is_err());
    }
}
