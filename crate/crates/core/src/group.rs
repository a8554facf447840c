//! Finite unipotent upper-triangular groups `B(N)`.
//!
//! A [`UnipotentMatrix`] is `I + x` with `x` strictly upper triangular. Only the
//! strictly-upper entries are stored (packed row-major); the unit diagonal and
//! the zero lower triangle are implicit. The scalar is generic so the same
//! multiplication and inversion code runs over exact rationals, floats and
//! symbolic polynomials, which is what lets it act as the oracle for the
//! closed-form identities in [`crate::symbolic`].

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::GroupError;

/// Scalars a unipotent matrix can carry.
pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
}

impl<T> Scalar for T where
    T: Clone
        + PartialEq
        + fmt::Debug
        + Zero
        + One
        + Add<Output = T>
        + Sub<Output = T>
        + Mul<Output = T>
        + Neg<Output = T>
{
}

/// A strictly-upper index pair `(k, n)`, 1-based, `k < n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TriangularIndex {
    pub k: usize,
    pub n: usize,
}

impl TriangularIndex {
    /// Validated constructor: requires `1 <= k < n <= size`.
    pub fn new(k: usize, n: usize, size: usize) -> Result<Self, GroupError> {
        if k == 0 || k >= n || n > size {
            return Err(GroupError::IndexOutOfRange { k, n, size });
        }
        Ok(Self { k, n })
    }

    /// All strictly-upper indices of `B(size)` in row-major order.
    pub fn all(size: usize) -> impl Iterator<Item = TriangularIndex> {
        (1..=size).flat_map(move |k| (k + 1..=size).map(move |n| TriangularIndex { k, n }))
    }

    pub fn is_superdiagonal(&self) -> bool {
        self.n == self.k + 1
    }
}

impl fmt::Display for TriangularIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.k, self.n)
    }
}

/// Number of strictly-upper slots of an `size x size` matrix.
pub fn slot_count(size: usize) -> usize {
    size * size.saturating_sub(1) / 2
}

#[inline]
fn slot(size: usize, k: usize, n: usize) -> usize {
    // rows 1..k-1 hold (size-1) + (size-2) + ... + (size-k+1) slots
    let before = (k - 1) * size - (k - 1) * k / 2;
    before + (n - k - 1)
}

/// Element `I + x` of `B(N)` over the scalar `S`.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct UnipotentMatrix<S> {
    size: usize,
    entries: Vec<S>,
}

impl<S: Scalar> UnipotentMatrix<S> {
    pub fn identity(size: usize) -> Self {
        Self {
            size,
            entries: vec![S::zero(); slot_count(size)],
        }
    }

    /// `E_kn(t) = I + t E_kn`.
    pub fn elementary(size: usize, k: usize, n: usize, t: S) -> Result<Self, GroupError> {
        let idx = TriangularIndex::new(k, n, size)?;
        let mut m = Self::identity(size);
        m.set(idx, t);
        Ok(m)
    }

    /// Builds a matrix from a closure over the strictly-upper indices.
    pub fn from_fn(size: usize, mut f: impl FnMut(TriangularIndex) -> S) -> Self {
        let entries = TriangularIndex::all(size).map(&mut f).collect();
        Self { size, entries }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Entry `(k, n)` of the full matrix, including the implicit diagonal and
    /// lower triangle.
    pub fn entry(&self, k: usize, n: usize) -> S {
        match k.cmp(&n) {
            std::cmp::Ordering::Less => self.entries[slot(self.size, k, n)].clone(),
            std::cmp::Ordering::Equal => S::one(),
            std::cmp::Ordering::Greater => S::zero(),
        }
    }

    /// Strictly-upper entry; panics when `idx` is not strictly upper for this size.
    pub fn get(&self, idx: TriangularIndex) -> &S {
        assert!(
            idx.k < idx.n && idx.n <= self.size,
            "index {idx:?} outside B({})",
            self.size
        );
        &self.entries[slot(self.size, idx.k, idx.n)]
    }

    pub fn set(&mut self, idx: TriangularIndex, value: S) {
        assert!(
            idx.k < idx.n && idx.n <= self.size,
            "index {idx:?} outside B({})",
            self.size
        );
        let s = slot(self.size, idx.k, idx.n);
        self.entries[s] = value;
    }

    /// Strictly-upper entries paired with their indices, row-major.
    pub fn iter(&self) -> impl Iterator<Item = (TriangularIndex, &S)> {
        TriangularIndex::all(self.size).zip(self.entries.iter())
    }

    pub fn map<T: Scalar>(&self, mut f: impl FnMut(&S) -> T) -> UnipotentMatrix<T> {
        UnipotentMatrix {
            size: self.size,
            entries: self.entries.iter().map(&mut f).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    /// Group product: `(ab)_kn = a_kn + b_kn + sum_{k<r<n} a_kr b_rn`.
    pub fn multiply(&self, other: &Self) -> Result<Self, GroupError> {
        if self.size != other.size {
            return Err(GroupError::SizeMismatch {
                left: self.size,
                right: other.size,
            });
        }
        let n = self.size;
        let out = Self::from_fn(n, |TriangularIndex { k, n: col }| {
            let mut acc = self.entries[slot(n, k, col)].clone() + other.entries[slot(n, k, col)].clone();
            for r in k + 1..col {
                let a = &self.entries[slot(n, k, r)];
                let b = &other.entries[slot(n, r, col)];
                if !a.is_zero() && !b.is_zero() {
                    acc = acc + a.clone() * b.clone();
                }
            }
            acc
        });
        Ok(out)
    }

    /// Inverse by back-substitution on `Y X = I`, one row at a time:
    /// `y_kn = -x_kn - sum_{k<r<n} y_kr x_rn`.
    pub fn invert(&self) -> Self {
        let size = self.size;
        let mut inv = Self::identity(size);
        for k in 1..=size {
            for col in k + 1..=size {
                let mut acc = -self.entries[slot(size, k, col)].clone();
                for r in k + 1..col {
                    let y = &inv.entries[slot(size, k, r)];
                    let x = &self.entries[slot(size, r, col)];
                    if !y.is_zero() && !x.is_zero() {
                        acc = acc - y.clone() * x.clone();
                    }
                }
                inv.entries[slot(size, k, col)] = acc;
            }
        }
        inv
    }

    /// Embeds into `B(target)` via `x -> x + E_{n+1,n+1}` repeatedly.
    pub fn embed(&self, target: usize) -> Result<Self, GroupError> {
        if target < self.size {
            return Err(GroupError::EmbedTooSmall {
                from: self.size,
                to: target,
            });
        }
        Ok(Self::from_fn(target, |idx| {
            if idx.n <= self.size {
                self.get(idx).clone()
            } else {
                S::zero()
            }
        }))
    }

    /// Full `size x size` matrix, diagonal and lower triangle included.
    pub fn to_dense(&self) -> Vec<Vec<S>> {
        (1..=self.size)
            .map(|k| (1..=self.size).map(|n| self.entry(k, n)).collect())
            .collect()
    }
}

impl<S: Scalar> fmt::Debug for UnipotentMatrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map()
            .entries(self.iter().map(|(i, v)| (format!("x{i}"), v)))
            .finish()
    }
}

/// `x^{-1} t^{-1} == (t x)^{-1}`, the inversion identity intertwining right and
/// left translations (`R_t ∘ Φ = Φ ∘ L_t` with `Φ(x) = x^{-1}`).
pub fn phi_inversion_identity_check<S: Scalar>(
    t: &UnipotentMatrix<S>,
    x: &UnipotentMatrix<S>,
) -> Result<bool, GroupError> {
    let lhs = x.invert().multiply(&t.invert())?;
    let rhs = t.multiply(x)?.invert();
    Ok(lhs == rhs)
}

impl UnipotentMatrix<f64> {
    /// Largest absolute entry difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl UnipotentMatrix<BigRational> {
    pub fn from_i64(size: usize, mut f: impl FnMut(TriangularIndex) -> i64) -> Self {
        Self::from_fn(size, |idx| BigRational::from_integer(f(idx).into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn lcg_matrix(size: usize, seed: &mut u64) -> UnipotentMatrix<BigRational> {
        UnipotentMatrix::from_fn(size, |_| {
            *seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let num = ((*seed >> 33) % 19) as i64 - 9;
            let den = ((*seed >> 20) % 5) as i64 + 1;
            q(num, den)
        })
    }

    #[test]
    fn slot_layout_is_row_major() {
        let idx: Vec<_> = TriangularIndex::all(4).map(|i| slot(4, i.k, i.n)).collect();
        assert_eq!(idx, (0..6).collect::<Vec<_>>());
        assert_eq!(slot_count(2), 1);
    }

    #[test]
    fn identity_is_neutral() {
        let mut seed = 7;
        let m = lcg_matrix(3, &mut seed);
        let id = UnipotentMatrix::identity(3);
        assert_eq!(id.multiply(&m).unwrap(), m);
        assert_eq!(m.multiply(&id).unwrap(), m);
        assert_eq!(
            UnipotentMatrix::<BigRational>::identity(4).invert(),
            UnipotentMatrix::identity(4)
        );
        let two = UnipotentMatrix::<BigRational>::identity(2);
        assert_eq!(two.iter().count(), 1);
        assert!(two.get(TriangularIndex { k: 1, n: 2 }).is_zero());
    }

    #[test]
    fn one_parameter_subgroup() {
        let a = UnipotentMatrix::elementary(2, 1, 2, q(3, 2)).unwrap();
        let b = UnipotentMatrix::elementary(2, 1, 2, q(-1, 3)).unwrap();
        let c = UnipotentMatrix::elementary(2, 1, 2, q(7, 6)).unwrap();
        assert_eq!(a.multiply(&b).unwrap(), c);
        assert_eq!(a.invert(), UnipotentMatrix::elementary(2, 1, 2, q(-3, 2)).unwrap());
    }

    #[test]
    fn e12_times_e23_fills_corner() {
        let a = UnipotentMatrix::elementary(3, 1, 2, q(1, 1)).unwrap();
        let b = UnipotentMatrix::elementary(3, 2, 3, q(1, 1)).unwrap();
        let p = a.multiply(&b).unwrap();
        assert_eq!(p.entry(1, 3), q(1, 1));
        assert_eq!(p.entry(1, 2), q(1, 1));
        assert_eq!(p.entry(2, 3), q(1, 1));
        // reversed order leaves the corner empty
        assert!(b.multiply(&a).unwrap().entry(1, 3).is_zero());
    }

    #[test]
    fn elementary_edge_cases() {
        assert!(UnipotentMatrix::elementary(4, 2, 3, q(0, 1)).unwrap().is_identity());
        let e = UnipotentMatrix::elementary(4, 1, 4, q(5, 1)).unwrap();
        for (idx, v) in e.iter() {
            if (idx.k, idx.n) == (1, 4) {
                assert_eq!(*v, q(5, 1));
            } else {
                assert!(v.is_zero());
            }
        }
        assert!(matches!(
            UnipotentMatrix::elementary(3, 2, 2, q(1, 1)),
            Err(GroupError::IndexOutOfRange { .. })
        ));
        assert!(UnipotentMatrix::elementary(3, 1, 4, q(1, 1)).is_err());
        assert!(UnipotentMatrix::elementary(3, 0, 2, q(1, 1)).is_err());
    }

    #[test]
    fn group_axioms_over_rationals() {
        let mut seed = 11;
        for _ in 0..100 {
            let a = lcg_matrix(5, &mut seed);
            let b = lcg_matrix(5, &mut seed);
            let c = lcg_matrix(5, &mut seed);
            let ab_c = a.multiply(&b).unwrap().multiply(&c).unwrap();
            let a_bc = a.multiply(&b.multiply(&c).unwrap()).unwrap();
            assert_eq!(ab_c, a_bc);
            assert!(a.multiply(&a.invert()).unwrap().is_identity());
            assert!(a.invert().multiply(&a).unwrap().is_identity());
            assert!(phi_inversion_identity_check(&a, &b).unwrap());
        }
    }

    #[test]
    fn size_mismatch_and_embed_errors() {
        let a = UnipotentMatrix::<f64>::identity(3);
        let b = UnipotentMatrix::<f64>::identity(4);
        assert!(matches!(
            a.multiply(&b),
            Err(GroupError::SizeMismatch { left: 3, right: 4 })
        ));
        assert!(matches!(b.embed(3), Err(GroupError::EmbedTooSmall { .. })));
        assert_eq!(
            UnipotentMatrix::<f64>::identity(2).embed(5).unwrap(),
            UnipotentMatrix::identity(5)
        );
    }

    #[test]
    fn embedding_is_a_homomorphism() {
        let mut seed = 3;
        for _ in 0..20 {
            let a = lcg_matrix(3, &mut seed);
            let b = lcg_matrix(3, &mut seed);
            let ab = a.multiply(&b).unwrap().embed(6).unwrap();
            let ea_eb = a.embed(6).unwrap().multiply(&b.embed(6).unwrap()).unwrap();
            assert_eq!(ab, ea_eb);
            assert_eq!(a.embed(6).unwrap().invert(), a.invert().embed(6).unwrap());
        }
    }

    #[test]
    fn phi_identity_with_identity_t() {
        let mut seed = 5;
        let x = lcg_matrix(4, &mut seed);
        assert!(phi_inversion_identity_check(&UnipotentMatrix::identity(4), &x).unwrap());
    }

    #[test]
    fn dense_view_has_unit_diagonal() {
        let mut seed = 9;
        let x = lcg_matrix(4, &mut seed);
        let d = x.multiply(&x.invert()).unwrap().to_dense();
        for (k, row) in d.iter().enumerate() {
            for (n, v) in row.iter().enumerate() {
                assert_eq!(v.is_one(), k == n, "({k},{n})");
            }
        }
    }
}
