//! Gaussian product measures `μ_b` on `B(N)`: density, sampling, translation
//! cocycles, `Δ(x)`, and the `S^L`, `E`, `S^{R,L}` criteria series.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::MeasureError;
use crate::group::{TriangularIndex, UnipotentMatrix};
use crate::symbolic::poly::{CompiledPolynomial, Variable};
use crate::symbolic::InverseTable;

/// Samples drawn per RNG stream when sampling in bulk.
pub const BATCH_SIZE: usize = 4096;

pub type WeightRule = Arc<dyn Fn(usize, usize) -> f64 + Send + Sync>;

/// The rule producing the weights `b_kn`.
#[derive(Clone)]
pub enum Family {
    /// `b_kn = s^{kn}`, i.e. `a_k^n` with `a_k = s^k`.
    Geometric {
        s: f64,
    },
    /// `b_kn = a_k^n` with `a_k = s^k` except at the listed rows.
    RowPower {
        s: f64,
        overrides: BTreeMap<usize, f64>,
    },
    /// `b_kn = value` for every index.
    Constant {
        value: f64,
    },
    /// Finite table; indices outside it are undefined.
    Explicit {
        weights: BTreeMap<TriangularIndex, f64>,
    },
    Custom {
        label: String,
        rule: WeightRule,
    },
}

impl Family {
    pub fn geometric(s: f64) -> Self {
        Family::Geometric { s }
    }

    /// Geometric rows with row `row` replaced by `a_row = base`.
    pub fn spliced(s: f64, row: usize, base: f64) -> Self {
        Family::RowPower {
            s,
            overrides: [(row, base)].into_iter().collect(),
        }
    }

    pub fn custom(label: impl Into<String>, rule: impl Fn(usize, usize) -> f64 + Send + Sync + 'static) -> Self {
        Family::Custom {
            label: label.into(),
            rule: Arc::new(rule),
        }
    }

    /// `a_k` for row-power families.
    pub fn row_base(&self, k: usize) -> Option<f64> {
        match self {
            Family::Geometric { s } => Some(s.powi(k as i32)),
            Family::RowPower { s, overrides } => Some(overrides.get(&k).copied().unwrap_or_else(|| s.powi(k as i32))),
            _ => None,
        }
    }

    fn ln_row_base(&self, k: usize) -> Option<f64> {
        match self {
            Family::Geometric { s } => Some(k as f64 * s.ln()),
            Family::RowPower { s, overrides } => Some(overrides.get(&k).map_or(k as f64 * s.ln(), |a| a.ln())),
            _ => None,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Family::Geometric { s } => format!("geometric b_kn = s^(kn), s = {s}"),
            Family::RowPower { s, overrides } => {
                let o: Vec<String> = overrides.iter().map(|(k, a)| format!("a_{k} = {a}")).collect();
                format!("row power b_kn = a_k^n, a_k = {s}^k except {}", o.join(", "))
            }
            Family::Constant { value } => format!("constant b_kn = {value}"),
            Family::Explicit { weights } => format!("explicit table of {} weights", weights.len()),
            Family::Custom { label, .. } => format!("custom rule {label}"),
        }
    }
}

impl fmt::Debug for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

/// A weight family restricted to the index window `k < n <= window`.
#[derive(Debug, Clone)]
pub struct MeasureParams {
    family: Family,
    window: usize,
}

impl MeasureParams {
    pub fn new(family: Family, window: usize) -> Result<Self, MeasureError> {
        if let Family::Geometric { s } | Family::RowPower { s, .. } = family {
            if !s.is_finite() || s <= 1.0 {
                return Err(MeasureError::InvalidBase(s));
            }
        }
        let params = MeasureParams { family, window };
        for idx in TriangularIndex::all(window) {
            let b = params.weight(idx);
            if b.is_nan() || b <= 0.0 {
                return Err(MeasureError::NonPositiveWeight {
                    k: idx.k,
                    n: idx.n,
                    value: b,
                });
            }
        }
        Ok(params)
    }

    pub fn geometric(s: f64, window: usize) -> Result<Self, MeasureError> {
        Self::new(Family::geometric(s), window)
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn window(&self) -> usize {
        self.window
    }

    /// Largest column index the family defines, if finite.
    fn index_limit(&self) -> Option<usize> {
        match self.family {
            Family::Explicit { .. } => Some(self.window),
            _ => None,
        }
    }

    /// `ln b_kn`, finite even where `b_kn` overflows.
    pub fn ln_weight(&self, idx: TriangularIndex) -> f64 {
        let TriangularIndex { k, n } = idx;
        match &self.family {
            Family::Geometric { .. } | Family::RowPower { .. } => {
                n as f64 * self.family.ln_row_base(k).expect("row-power family")
            }
            Family::Constant { value } => value.ln(),
            Family::Explicit { weights } => weights.get(&idx).copied().unwrap_or(f64::NAN).ln(),
            Family::Custom { rule, .. } => rule(k, n).ln(),
        }
    }

    pub fn weight(&self, idx: TriangularIndex) -> f64 {
        match &self.family {
            Family::Constant { value } => *value,
            Family::Explicit { weights } => weights.get(&idx).copied().unwrap_or(f64::NAN),
            Family::Custom { rule, .. } => rule(idx.k, idx.n),
            _ => self
                .family
                .row_base(idx.k)
                .expect("row-power family")
                .powi(idx.n as i32),
        }
    }

    fn check_size(&self, size: usize) -> Result<(), MeasureError> {
        if size > self.window {
            Err(MeasureError::WindowTooSmall {
                window: self.window,
                size,
            })
        } else {
            Ok(())
        }
    }
}

/// `sum_{k<n<=N} [ln(b_kn / π) / 2 - b_kn x_kn^2]`.
pub fn log_density(params: &MeasureParams, x: &UnipotentMatrix<f64>) -> Result<f64, MeasureError> {
    params.check_size(x.size())?;
    let mut acc = CompensatedSum::default();
    for (idx, &v) in x.iter() {
        let ln_b = params.ln_weight(idx);
        acc.add(0.5 * (ln_b - PI.ln()));
        acc.add(-ln_b.exp() * v * v);
    }
    Ok(acc.value())
}

fn normals(params: &MeasureParams, size: usize) -> Vec<(TriangularIndex, Normal<f64>)> {
    TriangularIndex::all(size)
        .map(|idx| {
            let sd = (-0.5 * (params.ln_weight(idx) + 2f64.ln())).exp();
            (idx, Normal::new(0.0, sd).expect("finite standard deviation"))
        })
        .collect()
}

fn draw(rng: &mut ChaCha8Rng, size: usize, dists: &[(TriangularIndex, Normal<f64>)]) -> UnipotentMatrix<f64> {
    let mut x = UnipotentMatrix::identity(size);
    for (idx, d) in dists {
        x.set(*idx, d.sample(rng));
    }
    x
}

/// RNG for stream `stream` of seed `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// One draw from `μ_b` on `B(size)`: independent `N(0, 1/(2 b_kn))` entries.
pub fn sample(params: &MeasureParams, size: usize, seed: u64) -> Result<UnipotentMatrix<f64>, MeasureError> {
    params.check_size(size)?;
    let dists = normals(params, size);
    Ok(draw(&mut stream_rng(seed, 0), size, &dists))
}

/// `count` draws, generated in parallel batches of [`BATCH_SIZE`] with one
/// RNG stream per batch; the output does not depend on the thread schedule.
pub fn sample_many(
    params: &MeasureParams,
    size: usize,
    count: usize,
    seed: u64,
) -> Result<Vec<UnipotentMatrix<f64>>, MeasureError> {
    params.check_size(size)?;
    let dists = normals(params, size);
    let batches = count.div_ceil(BATCH_SIZE);
    let out: Vec<Vec<_>> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = stream_rng(seed, b as u64);
            let len = BATCH_SIZE.min(count - b * BATCH_SIZE);
            (0..len).map(|_| draw(&mut rng, size, &dists)).collect()
        })
        .collect();
    Ok(out.into_iter().flatten().collect())
}

/// `ln dμ_b(x t) / dμ_b(x)`.
pub fn ln_rn_right(
    params: &MeasureParams,
    x: &UnipotentMatrix<f64>,
    t: &UnipotentMatrix<f64>,
) -> Result<f64, MeasureError> {
    let xt = x.multiply(t)?;
    Ok(log_density(params, &xt)? - log_density(params, x)?)
}

pub fn rn_right(
    params: &MeasureParams,
    x: &UnipotentMatrix<f64>,
    t: &UnipotentMatrix<f64>,
) -> Result<f64, MeasureError> {
    ln_rn_right(params, x, t).map(f64::exp)
}

/// `ln dμ_b(s^{-1} x) / dμ_b(x)`.
pub fn ln_rn_left(
    params: &MeasureParams,
    x: &UnipotentMatrix<f64>,
    s: &UnipotentMatrix<f64>,
) -> Result<f64, MeasureError> {
    let sx = s.invert().multiply(x)?;
    Ok(log_density(params, &sx)? - log_density(params, x)?)
}

pub fn rn_left(
    params: &MeasureParams,
    x: &UnipotentMatrix<f64>,
    s: &UnipotentMatrix<f64>,
) -> Result<f64, MeasureError> {
    ln_rn_left(params, x, s).map(f64::exp)
}

/// `ln Δ(x) = -sum b_kn (x_kn^2 - (x^{-1})_kn^2)` using the matrix inverse.
pub fn ln_delta(params: &MeasureParams, x: &UnipotentMatrix<f64>) -> Result<f64, MeasureError> {
    params.check_size(x.size())?;
    let inv = x.invert();
    let mut acc = CompensatedSum::default();
    for (idx, &v) in x.iter() {
        let vi = *inv.get(idx);
        acc.add(-params.weight(idx) * (v - vi) * (v + vi));
    }
    Ok(acc.value())
}

/// `Δ(x) = dμ_b(x) / dμ_b(x^{-1})`.
pub fn delta_value(params: &MeasureParams, x: &UnipotentMatrix<f64>) -> Result<f64, MeasureError> {
    ln_delta(params, x).map(f64::exp)
}

/// `ln Δ` through the expanded polynomials `w_kn`.
#[derive(Debug, Clone)]
pub struct PolynomialDelta {
    size: usize,
    w: Vec<(TriangularIndex, CompiledPolynomial)>,
}

impl PolynomialDelta {
    pub fn new(size: usize) -> Self {
        let table = InverseTable::new(size);
        let w = TriangularIndex::all(size)
            .filter(|i| !i.is_superdiagonal())
            .map(|i| (i, table.w(i.k, i.n).compile()))
            .collect();
        PolynomialDelta { size, w }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn ln_delta(&self, params: &MeasureParams, x: &UnipotentMatrix<f64>) -> Result<f64, MeasureError> {
        params.check_size(x.size())?;
        if x.size() != self.size {
            return Err(crate::error::GroupError::SizeMismatch {
                left: self.size,
                right: x.size(),
            }
            .into());
        }
        let coord = |v: Variable| match v {
            Variable::Coord(i) => *x.get(i),
            other => panic!("unexpected variable {other} in w"),
        };
        let mut acc = CompensatedSum::default();
        for (idx, w) in &self.w {
            acc.add(-params.weight(*idx) * w.eval(coord));
        }
        Ok(acc.value())
    }
}

/// Neumaier's compensated sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if !t.is_finite() {
            self.sum = t;
            self.compensation = 0.0;
            return;
        }
        if self.sum.abs() >= v.abs() {
            self.compensation += (self.sum - t) + v;
        } else {
            self.compensation += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        if self.sum.is_finite() {
            self.sum + self.compensation
        } else {
            self.sum
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesConfig {
    /// Terms evaluated per series.
    pub max_terms: usize,
    /// Largest admissible tail bound for a convergence verdict.
    pub tol: f64,
    /// Partial-sum level taken as evidence of divergence.
    pub threshold: f64,
}

impl Default for SeriesConfig {
    fn default() -> Self {
        SeriesConfig {
            max_terms: 200,
            tol: 1e-10,
            threshold: 1e9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Verdict {
    Converges {
        limit: f64,
    },
    /// `crossed_at` is the term index where the partial sum passed the
    /// threshold; `term_lower_bound` is a positive bound valid for every term.
    Diverges {
        crossed_at: Option<usize>,
        term_lower_bound: Option<f64>,
    },
    Inconclusive,
}

impl Verdict {
    pub fn converges(&self) -> bool {
        matches!(self, Verdict::Converges { .. })
    }

    pub fn diverges(&self) -> bool {
        matches!(self, Verdict::Diverges { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesVerdict {
    pub partial_sums: Vec<f64>,
    /// Upper bound on the sum of the omitted terms.
    pub tail_bound: Option<f64>,
    /// Natural log of `tail_bound`, kept when the bound underflows.
    pub ln_tail_bound: Option<f64>,
    pub closed_form: Option<f64>,
    pub verdict: Verdict,
    /// Conventions applied to individual terms.
    pub notes: Vec<String>,
}

impl SeriesVerdict {
    pub fn last(&self) -> f64 {
        self.partial_sums.last().copied().unwrap_or(0.0)
    }

    /// Limit estimate: the closed form when known, else the last partial sum.
    pub fn estimate(&self) -> f64 {
        match self.verdict {
            Verdict::Converges { limit } => limit,
            Verdict::Diverges { .. } => f64::INFINITY,
            Verdict::Inconclusive => self.last(),
        }
    }

    pub fn is_monotone(&self) -> bool {
        self.partial_sums.windows(2).all(|w| w[1] >= w[0])
    }
}

fn series_index(k: usize, n: usize) -> Result<TriangularIndex, MeasureError> {
    if k == 0 || k >= n {
        Err(MeasureError::BadSeriesIndex { k, n })
    } else {
        Ok(TriangularIndex { k, n })
    }
}

fn accumulate(terms: impl Iterator<Item = f64>, threshold: f64) -> (Vec<f64>, Option<usize>) {
    let mut acc = CompensatedSum::default();
    let mut partial = Vec::new();
    for (i, t) in terms.enumerate() {
        acc.add(t);
        partial.push(acc.value());
        if acc.value() > threshold {
            return (partial, Some(i));
        }
    }
    (partial, None)
}

/// `S^L_kn = sum_{m>n} b_km / b_nm`.
pub fn series_sl(
    params: &MeasureParams,
    k: usize,
    n: usize,
    config: &SeriesConfig,
) -> Result<SeriesVerdict, MeasureError> {
    series_index(k, n)?;
    let last = params
        .index_limit()
        .map_or(n + config.max_terms, |w| w.min(n + config.max_terms));
    let ratio = |m: usize| match (params.family.row_base(k), params.family.row_base(n)) {
        (Some(ak), Some(an)) => (ak / an).powi(m as i32),
        _ => (params.ln_weight(TriangularIndex { k, n: m }) - params.ln_weight(TriangularIndex { k: n, n: m })).exp(),
    };
    let (partial_sums, crossed) = accumulate((n + 1..=last).map(ratio), config.threshold);
    let crossed_at = crossed.map(|i| n + 1 + i);
    let mut out = SeriesVerdict {
        partial_sums,
        tail_bound: None,
        ln_tail_bound: None,
        closed_form: None,
        verdict: Verdict::Inconclusive,
        notes: Vec::new(),
    };

    let ln_q = match (params.family.ln_row_base(k), params.family.ln_row_base(n)) {
        (Some(a), Some(b)) => Some(a - b),
        _ => None,
    };
    if let Some(ln_q) = ln_q {
        if ln_q < 0.0 {
            let q = params.family.row_base(k).unwrap() / params.family.row_base(n).unwrap();
            // sum_{m>n} q^m and the omitted part sum_{m>last} q^m
            out.closed_form = Some(q.powi(n as i32 + 1) / (1.0 - q));
            let ln_tail = (last + 1) as f64 * ln_q - (-q).ln_1p();
            out.ln_tail_bound = Some(ln_tail);
            out.tail_bound = Some(ln_tail.exp());
            if ln_tail.exp() <= config.tol {
                out.verdict = Verdict::Converges {
                    limit: out.closed_form.unwrap(),
                };
            }
        } else {
            // q >= 1: every term q^m is at least 1
            out.verdict = Verdict::Diverges {
                crossed_at,
                term_lower_bound: Some(1.0),
            };
        }
        return Ok(out);
    }
    if let Family::Constant { .. } = params.family {
        out.verdict = Verdict::Diverges {
            crossed_at,
            term_lower_bound: Some(1.0),
        };
    } else if crossed_at.is_some() {
        out.verdict = Verdict::Diverges {
            crossed_at,
            term_lower_bound: None,
        };
    }
    Ok(out)
}

/// `E(b) = sum_{k<n<=max_index} S^L_kn / b_kn`.
pub fn series_e(
    params: &MeasureParams,
    max_index: usize,
    config: &SeriesConfig,
) -> Result<SeriesVerdict, MeasureError> {
    let max_index = params.index_limit().map_or(max_index, |w| w.min(max_index));
    let mut acc = CompensatedSum::default();
    let mut partial_sums = Vec::new();
    let mut divergent = Vec::new();
    let mut all_closed = true;
    for n in 2..=max_index {
        for k in 1..n {
            let sl = series_sl(params, k, n, config)?;
            match sl.verdict {
                Verdict::Diverges { .. } => divergent.push(TriangularIndex { k, n }),
                Verdict::Converges { limit } => {
                    acc.add((limit.ln() - params.ln_weight(TriangularIndex { k, n })).exp())
                }
                Verdict::Inconclusive => {
                    all_closed = false;
                    acc.add(sl.last() / params.weight(TriangularIndex { k, n }));
                }
            }
        }
        partial_sums.push(acc.value());
    }
    let mut out = SeriesVerdict {
        partial_sums,
        tail_bound: None,
        ln_tail_bound: None,
        closed_form: None,
        verdict: Verdict::Inconclusive,
        notes: Vec::new(),
    };
    if let Some(first) = divergent.first() {
        out.notes.push(format!("S^L_{first} diverges, so E(b) is infinite"));
        out.verdict = Verdict::Diverges {
            crossed_at: None,
            term_lower_bound: None,
        };
        return Ok(out);
    }
    if let (Family::Geometric { s }, true) = (&params.family, all_closed) {
        // S^L_kn / b_kn <= s^{k - n(n+1)} / (1 - 1/s), so the terms with
        // n > N sum to at most s^{-(N+1)^2} / ((s-1)(1-1/s)(1 - s^{-(2N+3)})).
        let ln_s = s.ln();
        let big_n = max_index as f64;
        let ln_tail = -(big_n + 1.0).powi(2) * ln_s
            - (s - 1.0).ln()
            - (-1.0 / s).ln_1p()
            - (-(-(2.0 * big_n + 3.0) * ln_s).exp()).ln_1p();
        out.ln_tail_bound = Some(ln_tail);
        out.tail_bound = Some(ln_tail.exp());
        if ln_tail.exp() <= config.tol {
            out.verdict = Verdict::Converges { limit: acc.value() };
        }
    }
    Ok(out)
}

/// `S^{R,L}_kn = sum_{m>n} b_km / S^L_nm`.
pub fn series_srl(
    params: &MeasureParams,
    k: usize,
    n: usize,
    config: &SeriesConfig,
) -> Result<SeriesVerdict, MeasureError> {
    series_index(k, n)?;
    let last = params
        .index_limit()
        .map_or(n + config.max_terms, |w| w.min(n + config.max_terms));
    let mut notes = Vec::new();
    let mut lower_bound = None;
    let terms: Vec<f64> = if let Family::Geometric { s } = params.family {
        // s^{(m+k-n)m} (s^{m-n} - 1), increasing in m
        let term = |m: usize| s.powi(((m + k - n) * m) as i32) * (s.powi((m - n) as i32) - 1.0);
        lower_bound = Some(term(n + 1));
        let mut v = Vec::new();
        let mut acc = 0.0;
        for m in n + 1..=last {
            let t = term(m);
            v.push(t);
            acc += t;
            if acc > config.threshold {
                break;
            }
        }
        v
    } else {
        let mut v = Vec::new();
        let mut acc = 0.0;
        for m in n + 1..=last {
            let sl = series_sl(params, n, m, config)?;
            let t = match sl.verdict {
                Verdict::Diverges { .. } => {
                    notes.push(format!("S^L_{n},{m} diverges; term m={m} counted as 0"));
                    0.0
                }
                Verdict::Converges { limit } => (params.ln_weight(TriangularIndex { k, n: m }) - limit.ln()).exp(),
                Verdict::Inconclusive => {
                    notes.push(format!("S^L_{n},{m} inconclusive; term m={m} uses its partial sum"));
                    params.weight(TriangularIndex { k, n: m }) / sl.last()
                }
            };
            v.push(t);
            acc += t;
            if acc > config.threshold {
                break;
            }
        }
        v
    };
    let (partial_sums, crossed) = accumulate(terms.into_iter(), config.threshold);
    let crossed_at = crossed.map(|i| n + 1 + i);
    let verdict = if crossed_at.is_some() || lower_bound.is_some() {
        Verdict::Diverges {
            crossed_at,
            term_lower_bound: lower_bound,
        }
    } else {
        Verdict::Inconclusive
    };
    Ok(SeriesVerdict {
        partial_sums,
        tail_bound: None,
        ln_tail_bound: None,
        closed_form: None,
        verdict,
        notes,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// Every `S^L` diverges.
    TypeIInfinity,
    /// Every `S^L` and `E` converge and every `S^{R,L}` diverges.
    TypeIIIOne,
    Mixed,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::TypeIInfinity => "type I∞ regime (irreducible right regular representation)",
            Regime::TypeIIIOne => "type III₁ factor regime",
            Regime::Mixed => "mixed/inconclusive regime",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassifyConfig {
    /// `S^L` and `S^{R,L}` are evaluated for `k < n <= window`.
    pub window: usize,
    /// Truncation of the double sum `E(b)`.
    pub e_window: usize,
    pub series: SeriesConfig,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        ClassifyConfig {
            window: 6,
            e_window: 40,
            series: SeriesConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RegimeReport {
    pub regime: Regime,
    pub family: String,
    pub sl: BTreeMap<String, SeriesVerdict>,
    pub e: SeriesVerdict,
    pub srl: BTreeMap<String, SeriesVerdict>,
}

pub fn classify(params: &MeasureParams, config: &ClassifyConfig) -> Result<RegimeReport, MeasureError> {
    let indices: Vec<_> = TriangularIndex::all(config.window).collect();
    let mut sl = BTreeMap::new();
    let mut srl = BTreeMap::new();
    for idx in &indices {
        sl.insert(idx.to_string(), series_sl(params, idx.k, idx.n, &config.series)?);
        srl.insert(idx.to_string(), series_srl(params, idx.k, idx.n, &config.series)?);
    }
    let e = series_e(params, config.e_window, &config.series)?;
    let regime = if sl.values().all(|v| v.verdict.diverges()) {
        Regime::TypeIInfinity
    } else if sl.values().all(|v| v.verdict.converges())
        && e.verdict.converges()
        && srl.values().all(|v| v.verdict.diverges())
    {
        Regime::TypeIIIOne
    } else {
        Regime::Mixed
    };
    Ok(RegimeReport {
        regime,
        family: params.family.describe(),
        sl,
        e,
        srl,
    })
}
