//! Exact checks of the commutator identities satisfied by `x^{-1}`, `w` and
//! `ln Δ` under the generators `D_pq` and `A^R_{m,m+1}`, plus the checks
//! that settle the notational conventions (generator coefficient index,
//! bracket sign, `t^2` coefficient, chain bounds).

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::formulas::{
    elementary_symbolic, inverse_coordinate_closed, inverse_coordinate_closed_inclusive, right_derivative,
    right_generator, right_generator_as_printed, substitute_right, symbolic_matrix, InverseTable,
};
use super::operator::DiffOperator;
use super::poly::Polynomial;
use crate::group::TriangularIndex;

fn two() -> Polynomial {
    Polynomial::integer(2)
}

fn b(k: usize, n: usize) -> Polynomial {
    Polynomial::weight(k, n)
}

fn x(k: usize, n: usize) -> Polynomial {
    Polynomial::coord(k, n)
}

/// Agreement of the recursive, closed-form and matrix-inverse expressions
/// for one `x^{-1}_kn`, plus the locality of its variables.
#[derive(Debug, Clone, Serialize)]
pub struct InverseFormulaCheck {
    pub index: TriangularIndex,
    pub closed_matches_recursive: bool,
    pub oracle_matches_recursive: bool,
    /// Variables of `x^{-1}_kn` lie in `{x_rs : k <= r < s <= n}`.
    pub local: bool,
    pub terms: usize,
}

impl InverseFormulaCheck {
    pub fn holds(&self) -> bool {
        self.closed_matches_recursive && self.oracle_matches_recursive && self.local
    }
}

pub fn check_inverse_formulas(size: usize) -> Vec<InverseFormulaCheck> {
    let table = InverseTable::new(size);
    let oracle = symbolic_matrix(size).invert();
    TriangularIndex::all(size)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|idx| {
            let rec = table.entry(idx.k, idx.n);
            let closed = inverse_coordinate_closed(idx.k, idx.n, size).expect("valid index");
            let local = rec.coordinates().iter().all(|c| idx.k <= c.k && c.n <= idx.n);
            InverseFormulaCheck {
                index: idx,
                closed_matches_recursive: closed == rec,
                oracle_matches_recursive: oracle.get(idx) == &rec,
                local,
                terms: rec.num_terms(),
            }
        })
        .collect()
}

/// `sum_{r=k}^{n} x_kr x^{-1}_rn = δ_kn = sum_{r=k}^{n} x^{-1}_kr x_rn`.
#[derive(Debug, Clone, Serialize)]
pub struct DeltaRelationCheck {
    pub k: usize,
    pub n: usize,
    pub right_inverse: bool,
    pub left_inverse: bool,
}

pub fn check_delta_relations(size: usize) -> Vec<DeltaRelationCheck> {
    let table = InverseTable::new(size);
    let xe = |k: usize, n: usize| -> Polynomial {
        if k == n {
            Polynomial::one()
        } else {
            x(k, n)
        }
    };
    let mut out = Vec::new();
    for k in 1..=size {
        for n in k..=size {
            let delta = if k == n { Polynomial::one() } else { Polynomial::zero() };
            let mut right = Polynomial::zero();
            let mut left = Polynomial::zero();
            for r in k..=n {
                right += &(&xe(k, r) * &table.entry(r, n));
                left += &(&table.entry(k, r) * &xe(r, n));
            }
            out.push(DeltaRelationCheck {
                k,
                n,
                right_inverse: right == delta,
                left_inverse: left == delta,
            });
        }
    }
    out
}

/// One instance of `[D_pq, x^{-1}_kn] = -x^{-1}_kp x^{-1}_qn` (if `k <= p < q <= n`, else 0).
#[derive(Debug, Clone, Serialize)]
pub struct DInverseCase {
    pub derivative: TriangularIndex,
    pub index: TriangularIndex,
    pub in_range: bool,
    pub holds: bool,
}

pub fn check_d_inverse_lemma(size: usize) -> Vec<DInverseCase> {
    let table = InverseTable::new(size);
    let indices: Vec<_> = TriangularIndex::all(size).collect();
    let mut out = Vec::new();
    for &pq in &indices {
        let d = DiffOperator::partial(pq);
        for &kn in &indices {
            let bracket = d.commutator(&DiffOperator::multiplication(table.entry(kn.k, kn.n)));
            let in_range = kn.k <= pq.k && pq.n <= kn.n;
            let expected = if in_range {
                -(&table.entry(kn.k, pq.k) * &table.entry(pq.n, kn.n))
            } else {
                Polynomial::zero()
            };
            out.push(DInverseCase {
                derivative: pq,
                index: kn,
                in_range,
                holds: bracket == DiffOperator::multiplication(expected),
            });
        }
    }
    out
}

/// Which branch of the `[A^R_{m,m+1}, w_kn]` case split an index falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ArWCaseKind {
    /// `k < n <= m`: 0.
    BelowColumn,
    /// `n = m+1, 1 <= k <= m-1`: `2 x_km x_{k,m+1}`.
    TargetColumn,
    /// `1 <= k <= m-1, n > m+1`: 0.
    RightOfColumn,
    /// `k = m, n >= m+2`: `2 x^{-1}_mn x^{-1}_{m+1,n}`.
    PivotRow,
    /// `m+1 <= k < n`: 0.
    BelowRow,
    /// `(k, n) = (m, m+1)`; `w` vanishes there.
    Superdiagonal,
}

#[derive(Debug, Clone, Serialize)]
pub struct ArWCase {
    pub m: usize,
    pub index: TriangularIndex,
    pub kind: ArWCaseKind,
    pub expected: String,
    pub computed: String,
    pub holds: bool,
}

fn ar_w_case(m: usize, idx: TriangularIndex, table: &InverseTable) -> (ArWCaseKind, Polynomial) {
    let TriangularIndex { k, n } = idx;
    if n <= m {
        (ArWCaseKind::BelowColumn, Polynomial::zero())
    } else if k > m {
        (ArWCaseKind::BelowRow, Polynomial::zero())
    } else if k == m && n == m + 1 {
        (ArWCaseKind::Superdiagonal, Polynomial::zero())
    } else if k == m {
        (
            ArWCaseKind::PivotRow,
            &two() * &(&table.entry(m, n) * &table.entry(m + 1, n)),
        )
    } else if n == m + 1 {
        (ArWCaseKind::TargetColumn, &two() * &(&x(k, m) * &x(k, m + 1)))
    } else {
        (ArWCaseKind::RightOfColumn, Polynomial::zero())
    }
}

/// `[A^R_{m,m+1}, w_kn]` for every `m < size` and every `(k, n)`, against the
/// five-case right-hand side.
pub fn verify_ar_w_lemma(size: usize) -> Vec<ArWCase> {
    let table = InverseTable::new(size);
    let mut jobs = Vec::new();
    for m in 1..size {
        for idx in TriangularIndex::all(size) {
            jobs.push((m, idx));
        }
    }
    jobs.into_par_iter()
        .map(|(m, idx)| {
            let a = right_generator(m, m + 1, size).expect("valid generator");
            let w = DiffOperator::multiplication(table.w(idx.k, idx.n));
            let bracket = a.commutator(&w);
            let (kind, expected) = ar_w_case(m, idx, &table);
            let holds = bracket == DiffOperator::multiplication(expected.clone());
            ArWCase {
                m,
                index: idx,
                kind,
                expected: expected.to_string(),
                computed: bracket.zero_order.to_string(),
                holds,
            }
        })
        .collect()
}

/// `-[A^R_{m,m+1}, ln Δ]` as stated:
/// `2 sum_{r<m} b_{r,m+1} x_rm x_{r,m+1} + 2 sum_{m+2<=n<=size} b_mn x^{-1}_mn x^{-1}_{m+1,n}`.
pub fn ar_ln_delta_rhs(m: usize, size: usize, table: &InverseTable) -> Polynomial {
    let mut acc = Polynomial::zero();
    for r in 1..m {
        acc += &(&two() * &(&b(r, m + 1) * &(&x(r, m) * &x(r, m + 1))));
    }
    for n in m + 2..=size {
        acc += &(&two() * &(&b(m, n) * &(&table.entry(m, n) * &table.entry(m + 1, n))));
    }
    acc
}

#[derive(Debug, Clone, Serialize)]
pub struct BracketIdentity {
    pub m: usize,
    pub size: usize,
    /// `[A^R_{m,m+1}, ln Δ]`.
    pub bracket: String,
    /// Unsigned right-hand side `2 sum b x x + 2 sum b x^{-1} x^{-1}`.
    pub rhs: String,
    /// `Some(s)` when `bracket == s * rhs`.
    pub sign: Option<i32>,
}

impl BracketIdentity {
    pub fn holds(&self) -> bool {
        self.sign.is_some()
    }
}

fn relative_sign(computed: &Polynomial, stated: &Polynomial) -> Option<i32> {
    if computed == stated {
        Some(1)
    } else if computed == &(-stated) {
        Some(-1)
    } else {
        None
    }
}

pub fn verify_ar_ln_delta(m: usize, size: usize) -> BracketIdentity {
    assert!(m >= 1 && m < size, "need 1 <= m < size");
    let table = InverseTable::new(size);
    let ln_delta = -table.neg_ln_delta();
    let bracket = ar_ln_delta_bracket(m, size, &ln_delta);
    let rhs = ar_ln_delta_rhs(m, size, &table);
    BracketIdentity {
        m,
        size,
        sign: relative_sign(&bracket, &rhs),
        bracket: bracket.to_string(),
        rhs: rhs.to_string(),
    }
}

/// `[A^R_{m,m+1}, ln Δ]` as a polynomial (the bracket is a multiplication operator).
pub fn ar_ln_delta_bracket(m: usize, size: usize, ln_delta: &Polynomial) -> Polynomial {
    let a = right_generator(m, m + 1, size).expect("valid generator");
    let c = a.commutator(&DiffOperator::multiplication(ln_delta.clone()));
    debug_assert!(c.is_multiplication());
    c.zero_order
}

/// Sign `s` with `[A^R_13, [A^R_23, ln Δ]] = s * 2 b_13 x_12`, for `size >= 3`.
pub fn nested_bracket_sign(size: usize) -> Option<i32> {
    let ln_delta = super::formulas::ln_delta_poly(size);
    let inner = DiffOperator::multiplication(ar_ln_delta_bracket(2, size, &ln_delta));
    let outer = right_generator(1, 3, size).ok()?.commutator(&inner);
    relative_sign(&outer.zero_order, &(&two() * &(&b(1, 3) * &x(1, 2))))
}

/// `w_kn(x E_{m,m+1}(t)) - w_kn(x)` in closed form, with the `t^2` term
/// carried by `x_km^2` on the target column.
pub fn translated_w_closed_form(
    m: usize,
    idx: TriangularIndex,
    table: &InverseTable,
    t_sq_uses_target: bool,
) -> Polynomial {
    let t = Polynomial::param("t");
    let TriangularIndex { k, n } = idx;
    if n == m + 1 && k < m {
        let sq = if t_sq_uses_target { x(k, m + 1) } else { x(k, m) };
        &(&two() * &(&t * &(&x(k, m) * &x(k, m + 1)))) + &(&t.pow(2) * &sq.pow(2))
    } else if k == m && n >= m + 2 {
        let a = table.entry(m, n);
        let c = table.entry(m + 1, n);
        &(&two() * &(&t * &(&a * &c))) - &(&t.pow(2) * &c.pow(2))
    } else {
        Polynomial::zero()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TranslatedWCase {
    pub m: usize,
    pub index: TriangularIndex,
    pub computed: String,
    /// Matches the form with `t^2 x_km^2`.
    pub matches_resolved: bool,
    /// Matches the form with `t^2 x_{k,m+1}^2`.
    pub matches_as_printed: bool,
}

pub fn translated_w_lemma(size: usize) -> Vec<TranslatedWCase> {
    let table = InverseTable::new(size);
    let mut jobs = Vec::new();
    for m in 1..size {
        for idx in TriangularIndex::all(size) {
            jobs.push((m, idx));
        }
    }
    jobs.into_par_iter()
        .map(|(m, idx)| {
            let w = table.w(idx.k, idx.n);
            let g = elementary_symbolic(size, m, m + 1, "t").expect("valid index");
            let diff = &substitute_right(&w, &g).expect("sizes agree") - &w;
            TranslatedWCase {
                m,
                index: idx,
                matches_resolved: diff == translated_w_closed_form(m, idx, &table, false),
                matches_as_printed: diff == translated_w_closed_form(m, idx, &table, true),
                computed: diff.to_string(),
            }
        })
        .collect()
}

/// Resolution of the `A^R_kn` coefficient index against `d/dt f(x E_kn(t))`.
#[derive(Debug, Clone, Serialize)]
pub struct GeneratorConventionCheck {
    pub index: TriangularIndex,
    pub upper_index_matches: bool,
    pub as_printed_matches: bool,
}

pub fn check_generator_convention(size: usize) -> Vec<GeneratorConventionCheck> {
    // probe with every coordinate and a few products
    let mut probes: Vec<Polynomial> = TriangularIndex::all(size).map(|i| x(i.k, i.n)).collect();
    let all: Vec<_> = TriangularIndex::all(size).collect();
    for w in all.windows(2) {
        probes.push(&x(w[0].k, w[0].n) * &x(w[1].k, w[1].n).pow(2));
    }
    TriangularIndex::all(size)
        .map(|idx| {
            let resolved = right_generator(idx.k, idx.n, size).expect("valid");
            let printed = right_generator_as_printed(idx.k, idx.n, size).expect("valid");
            let mut upper_ok = true;
            let mut printed_ok = true;
            for p in &probes {
                let truth = right_derivative(p, idx.k, idx.n, size).expect("valid");
                upper_ok &= resolved.apply(p) == truth;
                printed_ok &= printed.apply(p) == truth;
            }
            GeneratorConventionCheck {
                index: idx,
                upper_index_matches: upper_ok,
                as_printed_matches: printed_ok,
            }
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct ChainBoundCheck {
    pub index: TriangularIndex,
    pub strict_matches: bool,
    pub inclusive_matches: bool,
}

pub fn check_chain_bounds(size: usize) -> Vec<ChainBoundCheck> {
    let oracle = symbolic_matrix(size).invert();
    TriangularIndex::all(size)
        .map(|idx| ChainBoundCheck {
            index: idx,
            strict_matches: &inverse_coordinate_closed(idx.k, idx.n, size).expect("valid") == oracle.get(idx),
            inclusive_matches: &inverse_coordinate_closed_inclusive(idx.k, idx.n, size).expect("valid")
                == oracle.get(idx),
        })
        .collect()
}
