//! First-order differential operators with polynomial coefficients.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use super::poly::{Polynomial, Variable};
use crate::group::TriangularIndex;

/// `zero_order + sum_kn first_order[kn] * D_kn`, with derivatives on the
/// right. Polynomials embed as multiplication operators.
#[derive(Clone, PartialEq, Default)]
pub struct DiffOperator {
    pub zero_order: Polynomial,
    pub first_order: BTreeMap<TriangularIndex, Polynomial>,
}

impl DiffOperator {
    /// `D_kn = d/dx_kn`.
    pub fn partial(idx: TriangularIndex) -> Self {
        let mut first_order = BTreeMap::new();
        first_order.insert(idx, Polynomial::one());
        DiffOperator {
            zero_order: Polynomial::zero(),
            first_order,
        }
    }

    /// Multiplication by `p`.
    pub fn multiplication(p: Polynomial) -> Self {
        DiffOperator {
            zero_order: p,
            first_order: BTreeMap::new(),
        }
    }

    pub fn from_parts(
        zero_order: Polynomial,
        first_order: impl IntoIterator<Item = (TriangularIndex, Polynomial)>,
    ) -> Self {
        let mut op = DiffOperator {
            zero_order,
            first_order: BTreeMap::new(),
        };
        for (idx, c) in first_order {
            op.add_first_order(idx, &c);
        }
        op
    }

    fn add_first_order(&mut self, idx: TriangularIndex, c: &Polynomial) {
        let slot = self.first_order.entry(idx).or_default();
        *slot += c;
        if slot.is_zero() {
            self.first_order.remove(&idx);
        }
    }

    pub fn is_multiplication(&self) -> bool {
        self.first_order.is_empty()
    }

    /// The vector-field part alone.
    pub fn first_order_part(&self) -> DiffOperator {
        DiffOperator {
            zero_order: Polynomial::zero(),
            first_order: self.first_order.clone(),
        }
    }

    /// `sum_kn c_kn * dp/dx_kn`.
    fn derive(&self, p: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (idx, c) in &self.first_order {
            let d = p.derivative(Variable::Coord(*idx));
            if !d.is_zero() {
                out += &(c * &d);
            }
        }
        out
    }

    pub fn apply(&self, p: &Polynomial) -> Polynomial {
        let mut out = self.derive(p);
        if !self.zero_order.is_zero() {
            out += &(&self.zero_order * p);
        }
        out
    }

    /// `[a, b] = ab - ba`, reduced to normal form. The second-order parts of
    /// `ab` and `ba` cancel, so the result has order at most one.
    pub fn commutator(&self, other: &DiffOperator) -> DiffOperator {
        let zero_order = &self.derive(&other.zero_order) - &other.derive(&self.zero_order);
        let mut out = DiffOperator::multiplication(zero_order);
        let keys: std::collections::BTreeSet<_> = self
            .first_order
            .keys()
            .chain(other.first_order.keys())
            .copied()
            .collect();
        for idx in keys {
            let zero = Polynomial::zero();
            let bj = other.first_order.get(&idx).unwrap_or(&zero);
            let aj = self.first_order.get(&idx).unwrap_or(&zero);
            let c = &self.derive(bj) - &other.derive(aj);
            out.add_first_order(idx, &c);
        }
        out
    }

    pub fn add(&self, other: &DiffOperator) -> DiffOperator {
        let mut out = self.clone();
        out.zero_order += &other.zero_order;
        for (idx, c) in &other.first_order {
            out.add_first_order(*idx, c);
        }
        out
    }

    pub fn scale(&self, p: &Polynomial) -> DiffOperator {
        DiffOperator::from_parts(&self.zero_order * p, self.first_order.iter().map(|(i, c)| (*i, c * p)))
    }
}

impl fmt::Display for DiffOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if !self.zero_order.is_zero() {
            parts.push(format!("({})", self.zero_order));
        }
        for (idx, c) in &self.first_order {
            if c.is_one() {
                parts.push(format!("D{idx}"));
            } else {
                parts.push(format!("({c})*D{idx}"));
            }
        }
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

impl fmt::Debug for DiffOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DiffOperator({self})")
    }
}
