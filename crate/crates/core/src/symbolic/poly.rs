//! Sparse multivariate polynomials with exact rational coefficients.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use smallvec::SmallVec;

use crate::group::TriangularIndex;

/// Polynomial indeterminates, totally ordered: coordinates, then weights,
/// then free parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Variable {
    /// Matrix coordinate `x_kn`.
    Coord(TriangularIndex),
    /// Measure weight `b_kn`.
    Weight(TriangularIndex),
    /// Free scalar parameter such as `t`, `t1`, `s`.
    Param(&'static str),
}

impl Variable {
    pub fn coord(k: usize, n: usize) -> Self {
        Variable::Coord(TriangularIndex { k, n })
    }

    pub fn weight(k: usize, n: usize) -> Self {
        Variable::Weight(TriangularIndex { k, n })
    }

    pub fn as_coord(&self) -> Option<TriangularIndex> {
        match self {
            Variable::Coord(i) => Some(*i),
            _ => None,
        }
    }
}

fn fmt_pair(f: &mut fmt::Formatter<'_>, prefix: &str, i: &TriangularIndex) -> fmt::Result {
    if i.k < 10 && i.n < 10 {
        write!(f, "{prefix}{}{}", i.k, i.n)
    } else {
        write!(f, "{prefix}{},{}", i.k, i.n)
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Variable::Coord(i) => fmt_pair(f, "x", i),
            Variable::Weight(i) => fmt_pair(f, "b", i),
            Variable::Param(p) => f.write_str(p),
        }
    }
}

/// Product of variable powers, sorted by variable, no zero exponents.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial(SmallVec<[(Variable, u32); 4]>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(SmallVec::new())
    }

    pub fn var(v: Variable) -> Self {
        let mut s = SmallVec::new();
        s.push((v, 1));
        Monomial(s)
    }

    pub fn powers(&self) -> &[(Variable, u32)] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn exponent(&self, v: Variable) -> u32 {
        self.0
            .binary_search_by(|(w, _)| w.cmp(&v))
            .map(|i| self.0[i].1)
            .unwrap_or(0)
    }

    fn mul(&self, other: &Self) -> Self {
        let (a, b) = (&self.0, &other.0);
        let mut out = SmallVec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    /// Removes `v` entirely, returning the stripped monomial and its old exponent.
    fn split_off(&self, v: Variable) -> (Monomial, u32) {
        let mut rest = self.0.clone();
        match rest.binary_search_by(|(w, _)| w.cmp(&v)) {
            Ok(i) => {
                let e = rest.remove(i).1;
                (Monomial(rest), e)
            }
            Err(_) => (Monomial(rest), 0),
        }
    }
}

/// Canonical-form polynomial: no zero coefficients are ever stored, so
/// structural equality is polynomial equality.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, BigRational>,
}

pub fn rational(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl Polynomial {
    pub fn constant(c: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(), c);
        }
        Polynomial { terms }
    }

    pub fn integer(n: i64) -> Self {
        Self::constant(rational(n))
    }

    pub fn var(v: Variable) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Monomial::var(v), BigRational::one());
        Polynomial { terms }
    }

    pub fn coord(k: usize, n: usize) -> Self {
        Self::var(Variable::coord(k, n))
    }

    pub fn weight(k: usize, n: usize) -> Self {
        Self::var(Variable::weight(k, n))
    }

    pub fn param(name: &'static str) -> Self {
        Self::var(Variable::Param(name))
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, BigRational)>) -> Self {
        let mut p = Polynomial::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// `Some(c)` when the polynomial is the constant `c` (including zero).
    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Polynomial::zero();
        }
        Polynomial {
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Polynomial::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn variables(&self) -> BTreeSet<Variable> {
        self.terms.keys().flat_map(|m| m.0.iter().map(|(v, _)| *v)).collect()
    }

    pub fn coordinates(&self) -> BTreeSet<TriangularIndex> {
        self.variables().iter().filter_map(Variable::as_coord).collect()
    }

    pub fn degree_in(&self, v: Variable) -> u32 {
        self.terms.keys().map(|m| m.exponent(v)).max().unwrap_or(0)
    }

    /// Coefficient of `v^e`, as a polynomial in the remaining variables.
    pub fn coefficient(&self, v: Variable, e: u32) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let (rest, got) = m.split_off(v);
            if got == e {
                out.add_term(rest, c.clone());
            }
        }
        out
    }

    pub fn derivative(&self, v: Variable) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let (mut rest, e) = m.split_off(v);
            if e == 0 {
                continue;
            }
            if e > 1 {
                rest = rest.mul(&Monomial(smallvec::smallvec![(v, e - 1)]));
            }
            out.add_term(rest, c * rational(e as i64));
        }
        out
    }

    /// Simultaneous substitution; variables mapped to `None` are kept.
    pub fn substitute(&self, f: impl Fn(Variable) -> Option<Polynomial>) -> Polynomial {
        let mut cache: BTreeMap<Variable, Option<Polynomial>> = BTreeMap::new();
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let mut term = Polynomial::constant(c.clone());
            let mut kept = Monomial::one();
            for &(v, e) in m.0.iter() {
                let image = cache.entry(v).or_insert_with(|| f(v));
                match image {
                    Some(p) => term = &term * &p.pow(e),
                    None => kept = kept.mul(&Monomial(smallvec::smallvec![(v, e)])),
                }
            }
            for (tm, tc) in term.terms {
                out.add_term(tm.mul(&kept), tc);
            }
        }
        out
    }

    pub fn eval_f64(&self, f: impl Fn(Variable) -> f64) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| {
                let mut v = c.to_f64().unwrap_or(f64::NAN);
                for &(var, e) in m.0.iter() {
                    v *= f(var).powi(e as i32);
                }
                v
            })
            .sum()
    }

    pub fn eval_rational(&self, f: impl Fn(Variable) -> BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for (m, c) in &self.terms {
            let mut v = c.clone();
            for &(var, e) in m.0.iter() {
                v *= num_traits::pow(f(var), e as usize);
            }
            acc += v;
        }
        acc
    }

    /// Float copy for repeated evaluation.
    pub fn compile(&self) -> CompiledPolynomial {
        CompiledPolynomial {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (c.to_f64().unwrap_or(f64::NAN), m.0.to_vec()))
                .collect(),
        }
    }
}

/// Polynomial with `f64` coefficients, for evaluation in hot loops.
#[derive(Debug, Clone)]
pub struct CompiledPolynomial {
    terms: Vec<(f64, Vec<(Variable, u32)>)>,
}

impl CompiledPolynomial {
    pub fn eval(&self, f: impl Fn(Variable) -> f64) -> f64 {
        self.terms
            .iter()
            .map(|(c, m)| m.iter().fold(*c, |acc, &(v, e)| acc * f(v).powi(e as i32)))
            .sum()
    }
}

impl Zero for Polynomial {
    fn zero() -> Self {
        Polynomial { terms: BTreeMap::new() }
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for Polynomial {
    fn one() -> Self {
        Polynomial::integer(1)
    }
}

impl<'a> Add<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &'a Polynomial) -> Polynomial {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl AddAssign<&Polynomial> for Polynomial {
    fn add_assign(&mut self, rhs: &Polynomial) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl<'a> Sub<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &'a Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl<'a> Mul<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &'a Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr<Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $method(self, rhs: Polynomial) -> Polynomial {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $tr<&'a Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $method(self, rhs: &'a Polynomial) -> Polynomial {
                (&self).$method(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            match (i, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let unit = abs.is_one();
            if !unit || m.0.is_empty() {
                write!(f, "{abs}")?;
            }
            for (j, (v, e)) in m.0.iter().enumerate() {
                if j > 0 || !unit {
                    f.write_str("*")?;
                }
                write!(f, "{v}")?;
                if *e > 1 {
                    write!(f, "^{e}")?;
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn x(k: usize, n: usize) -> Polynomial {
        Polynomial::coord(k, n)
    }

    #[test]
    fn canonical_form_drops_cancelled_terms() {
        let p = &x(1, 2) + &x(2, 3);
        let q = &p - &x(2, 3);
        assert_eq!(q, x(1, 2));
        assert!((&q - &x(1, 2)).is_zero());
        assert_eq!((&q - &q).num_terms(), 0);
    }

    #[test]
    fn derivative_of_square() {
        let p = x(1, 2).pow(2);
        assert_eq!(p.derivative(Variable::coord(1, 2)), &Polynomial::integer(2) * &x(1, 2));
        assert!(Polynomial::integer(7).derivative(Variable::coord(1, 2)).is_zero());
    }

    #[test]
    fn coefficient_extraction() {
        // 3 t^2 x12 + t x13 - 5
        let t = Polynomial::param("t");
        let p = &(&Polynomial::integer(3) * &(&t.pow(2) * &x(1, 2)) + &(&t * &x(1, 3))) - &Polynomial::integer(5);
        let tv = Variable::Param("t");
        assert_eq!(p.coefficient(tv, 2), &Polynomial::integer(3) * &x(1, 2));
        assert_eq!(p.coefficient(tv, 1), x(1, 3));
        assert_eq!(p.coefficient(tv, 0), Polynomial::integer(-5));
        assert_eq!(p.degree_in(tv), 2);
    }

    #[test]
    fn substitution_is_simultaneous() {
        // x12 -> x23, x23 -> x12 swaps the two
        let p = &x(1, 2) * &x(2, 3).pow(2);
        let s = p.substitute(|v| match v {
            Variable::Coord(TriangularIndex { k: 1, n: 2 }) => Some(x(2, 3)),
            Variable::Coord(TriangularIndex { k: 2, n: 3 }) => Some(x(1, 2)),
            _ => None,
        });
        assert_eq!(s, &x(2, 3) * &x(1, 2).pow(2));
    }

    #[test]
    fn display_is_readable() {
        let p = &(&Polynomial::integer(2) * &(&Polynomial::weight(1, 3) * &x(1, 2))) - &x(1, 3).pow(2);
        assert_eq!(p.to_string(), "2*x12*b13 - x13^2");
        assert_eq!(Polynomial::zero().to_string(), "0");
    }

    fn arb_poly() -> impl Strategy<Value = Polynomial> {
        let vars = prop::sample::select(vec![
            Variable::coord(1, 2),
            Variable::coord(1, 3),
            Variable::coord(2, 3),
            Variable::weight(1, 3),
            Variable::Param("t"),
        ]);
        prop::collection::vec((-4i64..5, prop::collection::vec((vars, 1u32..3), 0..3)), 0..5).prop_map(|terms| {
            let mut p = Polynomial::zero();
            for (c, powers) in terms {
                let mut t = Polynomial::integer(c);
                for (v, e) in powers {
                    t = &t * &Polynomial::var(v).pow(e);
                }
                p += &t;
            }
            p
        })
    }

    proptest! {
        #[test]
        fn ring_axioms(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert!((&a - &a).is_zero());
        }

        #[test]
        fn leibniz_rule(a in arb_poly(), b in arb_poly()) {
            let v = Variable::coord(1, 3);
            let lhs = (&a * &b).derivative(v);
            let rhs = &(&a.derivative(v) * &b) + &(&a * &b.derivative(v));
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn evaluation_is_a_ring_homomorphism(a in arb_poly(), b in arb_poly()) {
            let at = |v: Variable| match v {
                Variable::Coord(i) => rational((i.k * 3 + i.n) as i64) / rational(7),
                Variable::Weight(_) => rational(-2),
                Variable::Param(_) => rational(5) / rational(3),
            };
            prop_assert_eq!((&a * &b).eval_rational(at), a.eval_rational(at) * b.eval_rational(at));
            prop_assert_eq!((&a + &b).eval_rational(at), a.eval_rational(at) + b.eval_rational(at));
        }
    }
}
