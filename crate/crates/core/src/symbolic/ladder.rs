//! Iterated-bracket extraction of the coordinate functions.
//!
//! For each `m = 2..N-1` start from `V_0 = [A^R_{m,m+1}, ln Δ]` and descend
//! `V_s = [A^R_{m-s,m-s+1}, V_{s-1}]`. Level `s` equals
//! `∓2 (sum_{r<m-s} b_{r,m+1} x_{r,m-s} x_{r,m+1} + b_{m-s,m+1} x_{m-s,m+1})`,
//! which is a weight times `x_{m-s,m+1}` plus terms in coordinates already
//! known. The cross bracket `[A^R_{m-1,m+1}, V_0]` yields `x_{m-1,m}` the same
//! way. The last superdiagonal coordinate `x_{N-1,N}` is only reached at
//! step `m = N` in this scheme, so it is extracted separately from the
//! inverse-coordinate sum: `[A^R_{N-2,N}, [A^R_{N-2,N-1}, ln Δ]] = ∓2 b_{N-2,N} x_{N-1,N}`.

use std::collections::BTreeSet;

use num_traits::Zero;
use serde::Serialize;

use super::formulas::{right_generator, InverseTable};
use super::lemmas::ar_ln_delta_bracket;
use super::operator::DiffOperator;
use super::poly::{rational, Polynomial, Variable};
use crate::error::SymbolicError;
use crate::group::TriangularIndex;

/// Ordering of the extractions inside one step `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LadderOrder {
    /// `m=2`: `x12, x13`; `m=3`: `x14, x24, x23`; `m>=4`:
    /// `x_{1,m+1}..x_{m-2,m+1}, x_{m-1,m}, x_{m-1,m+1}`.
    Stated,
    /// `x_{1,m+1}..x_{m-2,m+1}, x_{m-1,m}, x_{m-1,m+1}` for every `m`.
    Schedule,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Source {
    /// `V_s` of the descending chain.
    Chain(usize),
    /// `[A^R_{m-1,m+1}, V_0]`.
    Cross,
}

#[derive(Debug, Clone, Serialize)]
pub struct Extraction {
    pub step: usize,
    pub coordinate: TriangularIndex,
    /// Generators `A^R_ij`, outermost first, ending with the one applied to `ln Δ`.
    pub generators: Vec<TriangularIndex>,
    /// Weight polynomial multiplying the coordinate, e.g. `-2*b13`.
    pub prefactor: String,
    pub sign: i32,
    pub weight: TriangularIndex,
    /// Full bracket value before reduction.
    pub bracket: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct LadderReport {
    pub size: usize,
    pub order: LadderOrder,
    /// Common sign of every prefactor relative to `+2 b`.
    pub sign: i32,
    pub schedule: Vec<Extraction>,
    /// `x_{N-1,N}`, reached through the inverse-coordinate sum.
    pub boundary: Extraction,
    /// Every chain level matched its closed form.
    pub levels_match: bool,
}

impl LadderReport {
    pub fn coordinates(&self) -> Vec<TriangularIndex> {
        self.schedule.iter().map(|e| e.coordinate).collect()
    }

    /// Schedule followed by the boundary coordinate.
    pub fn all_coordinates(&self) -> Vec<TriangularIndex> {
        let mut out = self.coordinates();
        out.push(self.boundary.coordinate);
        out
    }
}

fn ix(k: usize, n: usize) -> TriangularIndex {
    TriangularIndex { k, n }
}

fn step_plan(m: usize, order: LadderOrder) -> Vec<Source> {
    match (order, m) {
        (LadderOrder::Stated, 3) => vec![Source::Chain(2), Source::Chain(1), Source::Cross],
        _ => (2..m)
            .rev()
            .map(Source::Chain)
            .chain([Source::Cross, Source::Chain(1)])
            .collect(),
    }
}

/// Coordinate order the ladder must produce (boundary coordinate excluded).
pub fn expected_schedule(size: usize, order: LadderOrder) -> Vec<TriangularIndex> {
    let mut out = Vec::new();
    for m in 2..size {
        for src in step_plan(m, order) {
            out.push(match src {
                Source::Chain(s) => ix(m - s, m + 1),
                Source::Cross => ix(m - 1, m),
            });
        }
    }
    out
}

/// Closed form of level `s` of step `m`, without the overall sign:
/// `2 (sum_{r<m-s} b_{r,m+1} x_{r,m-s} x_{r,m+1} + b_{m-s,m+1} x_{m-s,m+1})`.
pub fn level_closed_form(m: usize, s: usize) -> Polynomial {
    let j = m - s;
    let mut acc = &Polynomial::weight(j, m + 1) * &Polynomial::coord(j, m + 1);
    for r in 1..j {
        acc += &(&Polynomial::weight(r, m + 1) * &(&Polynomial::coord(r, j) * &Polynomial::coord(r, m + 1)));
    }
    acc.scale(&rational(2))
}

fn bracket(generator: TriangularIndex, size: usize, value: &Polynomial) -> Polynomial {
    let a = right_generator(generator.k, generator.n, size).expect("valid generator");
    let c = a.commutator(&DiffOperator::multiplication(value.clone()));
    debug_assert!(c.is_multiplication());
    c.zero_order
}

/// Splits `value = c * x_target + rest` with `c` a nonzero constant times a
/// single weight and `rest` free of unknown coordinates. Returns `(sign, weight)`.
fn reduce(
    value: &Polynomial,
    target: TriangularIndex,
    known: &BTreeSet<TriangularIndex>,
    step: usize,
) -> Result<(Polynomial, i32, TriangularIndex), SymbolicError> {
    let fail = |reason: String| SymbolicError::NotReducible {
        target: target.to_string(),
        step,
        reason,
    };
    let var = Variable::Coord(target);
    if value.degree_in(var) != 1 {
        return Err(fail(format!("degree {} in x{target}", value.degree_in(var))));
    }
    let prefactor = value.coefficient(var, 1);
    let rest = value.coefficient(var, 0);
    let unknown: Vec<String> = rest
        .coordinates()
        .into_iter()
        .filter(|c| !known.contains(c))
        .map(|c| format!("x{c}"))
        .collect();
    if !unknown.is_empty() {
        return Err(fail(format!("remainder involves unknown {}", unknown.join(", "))));
    }
    let single = {
        let mut terms = prefactor.terms();
        match (terms.next(), terms.next()) {
            (Some((m, c)), None) => Some((m.clone(), c.clone())),
            _ => None,
        }
    };
    let Some((mono, coeff)) = single else {
        return Err(fail(format!("prefactor {prefactor} is not a single term")));
    };
    let weight = match mono.powers() {
        [(Variable::Weight(w), 1)] => *w,
        _ => return Err(fail(format!("prefactor {prefactor} is not a weight"))),
    };
    let sign = if coeff == rational(2) {
        1
    } else if coeff == rational(-2) {
        -1
    } else {
        return Err(fail(format!("prefactor {prefactor} is not ±2 b")));
    };
    Ok((prefactor, sign, weight))
}

pub fn ladder(size: usize) -> Result<LadderReport, SymbolicError> {
    ladder_with_order(size, LadderOrder::Stated)
}

pub fn ladder_with_order(size: usize, order: LadderOrder) -> Result<LadderReport, SymbolicError> {
    if size < 3 {
        return Err(SymbolicError::LadderTooSmall(size));
    }
    let ln_delta = -InverseTable::new(size).neg_ln_delta();
    let mut known = BTreeSet::new();
    let mut schedule = Vec::new();
    let mut levels_match = true;
    let mut signs = BTreeSet::new();

    for m in 2..size {
        let v0 = ar_ln_delta_bracket(m, size, &ln_delta);
        // levels[s] = V_s
        let mut levels = vec![v0.clone()];
        for s in 1..m {
            let next = bracket(ix(m - s, m - s + 1), size, &levels[s - 1]);
            let closed = level_closed_form(m, s);
            levels_match &= next == closed || next == -&closed;
            levels.push(next);
        }
        let cross = bracket(ix(m - 1, m + 1), size, &v0);

        for src in step_plan(m, order) {
            let (target, value, generators) = match src {
                Source::Chain(s) => {
                    let gens = (1..=s)
                        .rev()
                        .map(|j| ix(m - j, m - j + 1))
                        .chain([ix(m, m + 1)])
                        .collect();
                    (ix(m - s, m + 1), &levels[s], gens)
                }
                Source::Cross => (ix(m - 1, m), &cross, vec![ix(m - 1, m + 1), ix(m, m + 1)]),
            };
            let (prefactor, sign, weight) = reduce(value, target, &known, m)?;
            signs.insert(sign);
            known.insert(target);
            schedule.push(Extraction {
                step: m,
                coordinate: target,
                generators,
                prefactor: prefactor.to_string(),
                sign,
                weight,
                bracket: value.to_string(),
            });
        }
    }

    let inner = bracket(ix(size - 2, size - 1), size, &ln_delta);
    let outer = bracket(ix(size - 2, size), size, &inner);
    let target = ix(size - 1, size);
    let (prefactor, sign, weight) = reduce(&outer, target, &known, size)?;
    signs.insert(sign);
    let boundary = Extraction {
        step: size,
        coordinate: target,
        generators: vec![ix(size - 2, size), ix(size - 2, size - 1)],
        prefactor: prefactor.to_string(),
        sign,
        weight,
        bracket: outer.to_string(),
    };

    if signs.len() != 1 {
        return Err(SymbolicError::NotReducible {
            target: "*".into(),
            step: 0,
            reason: "prefactor signs differ between extractions".into(),
        });
    }
    let sign = *signs.iter().next().expect("one sign");
    debug_assert!(!ln_delta.is_zero());
    Ok(LadderReport {
        size,
        order,
        sign,
        schedule,
        boundary,
        levels_match,
    })
}
