//! Closed-form building blocks: inverse coordinates, `w_kn`, `ln Δ`, the
//! right generators `A^R_kn` and right translation of polynomials.

use num_traits::{One, Zero};

use super::operator::DiffOperator;
use super::poly::{Polynomial, Variable};
use crate::error::GroupError;
use crate::group::{TriangularIndex, UnipotentMatrix};

/// `X = I + sum x_kn E_kn` with every coordinate a free variable.
pub fn symbolic_matrix(size: usize) -> UnipotentMatrix<Polynomial> {
    UnipotentMatrix::from_fn(size, |i| Polynomial::var(Variable::Coord(i)))
}

/// Entry `(k, n)` of the symbolic `X`, with `x_kk = 1`.
fn x_entry(k: usize, n: usize) -> Polynomial {
    match k.cmp(&n) {
        std::cmp::Ordering::Less => Polynomial::coord(k, n),
        std::cmp::Ordering::Equal => Polynomial::one(),
        std::cmp::Ordering::Greater => Polynomial::zero(),
    }
}

/// Table of all `x^{-1}_kn` for `n <= size`, built from the recursion
/// `x^{-1}_kn = -x_kn - sum_{k<r<n} x_kr x^{-1}_rn` (base `x^{-1}_{k,k+1} = -x_{k,k+1}`).
#[derive(Debug, Clone)]
pub struct InverseTable {
    size: usize,
    inverse: UnipotentMatrix<Polynomial>,
}

impl InverseTable {
    pub fn new(size: usize) -> Self {
        let mut inverse = UnipotentMatrix::identity(size);
        for n in 2..=size {
            for k in (1..n).rev() {
                let mut acc = -Polynomial::coord(k, n);
                for r in k + 1..n {
                    acc = &acc - &(&Polynomial::coord(k, r) * inverse.get(TriangularIndex { k: r, n }));
                }
                inverse.set(TriangularIndex { k, n }, acc);
            }
        }
        InverseTable { size, inverse }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// `x^{-1}_kn`, with `x^{-1}_kk = 1` and zero below the diagonal.
    pub fn entry(&self, k: usize, n: usize) -> Polynomial {
        self.inverse.entry(k, n)
    }

    pub fn matrix(&self) -> &UnipotentMatrix<Polynomial> {
        &self.inverse
    }

    /// `w_kn = x_kn^2 - (x^{-1}_kn)^2`.
    pub fn w(&self, k: usize, n: usize) -> Polynomial {
        let xi = self.entry(k, n);
        &Polynomial::coord(k, n).pow(2) - &(&xi * &xi)
    }

    /// `sum_{k<n<=size} b_kn w_kn`, i.e. `-ln Δ` truncated to `B(size)`.
    pub fn neg_ln_delta(&self) -> Polynomial {
        let mut acc = Polynomial::zero();
        for idx in TriangularIndex::all(self.size) {
            if idx.is_superdiagonal() {
                continue;
            }
            acc += &(&Polynomial::weight(idx.k, idx.n) * &self.w(idx.k, idx.n));
        }
        acc
    }
}

pub fn inverse_coordinate_recursive(k: usize, n: usize, size: usize) -> Result<Polynomial, GroupError> {
    let idx = TriangularIndex::new(k, n, size)?;
    // x^{-1}_kn only involves x_rs with k <= r < s <= n, so B(n) suffices.
    Ok(InverseTable::new(idx.n).entry(k, n))
}

/// `x^{-1}_kn = -x_kn + sum_{r>=1} (-1)^{r+1} sum_{k<i_1<...<i_r<n} x_{k i_1} x_{i_1 i_2} ... x_{i_r n}`.
///
/// The chain indices run strictly inside `(k, n)`.
pub fn inverse_coordinate_closed(k: usize, n: usize, size: usize) -> Result<Polynomial, GroupError> {
    TriangularIndex::new(k, n, size)?;
    let interior: Vec<usize> = (k + 1..n).collect();
    let mut acc = -Polynomial::coord(k, n);
    for mask in 1u64..(1u64 << interior.len()) {
        let chain: Vec<usize> = interior
            .iter()
            .enumerate()
            .filter(|(bit, _)| mask >> bit & 1 == 1)
            .map(|(_, i)| *i)
            .collect();
        let r = chain.len();
        let mut term = if r % 2 == 1 {
            Polynomial::one()
        } else {
            -Polynomial::one()
        };
        let mut prev = k;
        for &i in chain.iter().chain(std::iter::once(&n)) {
            term = &term * &Polynomial::coord(prev, i);
            prev = i;
        }
        acc += &term;
    }
    Ok(acc)
}

/// The chain formula read with inclusive bounds `k <= i_1 < ... < i_r <= n`
/// and `x_kk = x_nn = 1`, for `r = 1..n-k-1`. Kept to show that this reading
/// disagrees with the matrix inverse.
pub fn inverse_coordinate_closed_inclusive(k: usize, n: usize, size: usize) -> Result<Polynomial, GroupError> {
    TriangularIndex::new(k, n, size)?;
    let pool: Vec<usize> = (k..=n).collect();
    let max_r = n - k - 1;
    let mut acc = -Polynomial::coord(k, n);
    for mask in 1u64..(1u64 << pool.len()) {
        let chain: Vec<usize> = pool
            .iter()
            .enumerate()
            .filter(|(bit, _)| mask >> bit & 1 == 1)
            .map(|(_, i)| *i)
            .collect();
        let r = chain.len();
        if r > max_r {
            continue;
        }
        let mut term = if r % 2 == 1 {
            Polynomial::one()
        } else {
            -Polynomial::one()
        };
        let mut prev = k;
        for &i in chain.iter().chain(std::iter::once(&n)) {
            term = &term * &x_entry(prev, i);
            prev = i;
        }
        acc += &term;
    }
    Ok(acc)
}

pub fn w_poly(k: usize, n: usize, size: usize) -> Result<Polynomial, GroupError> {
    let idx = TriangularIndex::new(k, n, size)?;
    Ok(InverseTable::new(idx.n).w(k, n))
}

/// `ln Δ(x) = -sum_{k<n<=size} b_kn w_kn(x)` with symbolic weights.
pub fn ln_delta_poly(size: usize) -> Polynomial {
    -neg_ln_delta_poly(size)
}

/// `-ln Δ = sum_{k<n<=size} b_kn w_kn`.
pub fn neg_ln_delta_poly(size: usize) -> Polynomial {
    InverseTable::new(size).neg_ln_delta()
}

/// `A^R_kn = sum_{r<k} x_rk D_rn + D_kn`, the generator of `x -> x E_kn(t)`.
pub fn right_generator(k: usize, n: usize, size: usize) -> Result<DiffOperator, GroupError> {
    TriangularIndex::new(k, n, size)?;
    let first = (1..k)
        .map(|r| (TriangularIndex { k: r, n }, Polynomial::coord(r, k)))
        .chain(std::iter::once((TriangularIndex { k, n }, Polynomial::one())));
    Ok(DiffOperator::from_parts(Polynomial::zero(), first))
}

/// The generator with coefficient `x_kr` (`r < k`) instead of `x_rk`. In
/// unipotent coordinates `x_kr` with `r < k` sits below the diagonal and is
/// identically zero, so this collapses to `D_kn`.
pub fn right_generator_as_printed(k: usize, n: usize, size: usize) -> Result<DiffOperator, GroupError> {
    TriangularIndex::new(k, n, size)?;
    let first = (1..k)
        .map(|r| (TriangularIndex { k: r, n }, x_entry(k, r)))
        .chain(std::iter::once((TriangularIndex { k, n }, Polynomial::one())));
    Ok(DiffOperator::from_parts(Polynomial::zero(), first))
}

/// `p(x) -> p(x g)`: every `x_kn` is replaced by `(X g)_kn`.
pub fn substitute_right(p: &Polynomial, g: &UnipotentMatrix<Polynomial>) -> Result<Polynomial, GroupError> {
    let size = g.size();
    check_coordinates(p, size)?;
    let xg = symbolic_matrix(size).multiply(g)?;
    Ok(p.substitute(|v| match v {
        Variable::Coord(i) => Some(xg.get(i).clone()),
        _ => None,
    }))
}

/// `p(x) -> p(g x)`.
pub fn substitute_left(p: &Polynomial, g: &UnipotentMatrix<Polynomial>) -> Result<Polynomial, GroupError> {
    let size = g.size();
    check_coordinates(p, size)?;
    let gx = g.multiply(&symbolic_matrix(size))?;
    Ok(p.substitute(|v| match v {
        Variable::Coord(i) => Some(gx.get(i).clone()),
        _ => None,
    }))
}

fn check_coordinates(p: &Polynomial, size: usize) -> Result<(), GroupError> {
    if let Some(bad) = p.coordinates().into_iter().find(|i| i.n > size) {
        return Err(GroupError::SizeMismatch {
            left: bad.n,
            right: size,
        });
    }
    Ok(())
}

/// `E_kn(t)` with a symbolic parameter.
pub fn elementary_symbolic(
    size: usize,
    k: usize,
    n: usize,
    param: &'static str,
) -> Result<UnipotentMatrix<Polynomial>, GroupError> {
    UnipotentMatrix::elementary(size, k, n, Polynomial::param(param))
}

/// `d/dt p(x E_kn(t)) |_{t=0}`, computed by substitution and differentiation.
pub fn right_derivative(p: &Polynomial, k: usize, n: usize, size: usize) -> Result<Polynomial, GroupError> {
    let t = Variable::Param("__t");
    let g = elementary_symbolic(size, k, n, "__t")?;
    let shifted = substitute_right(p, &g)?;
    Ok(shifted.derivative(t).substitute(|v| (v == t).then(Polynomial::zero)))
}
