//! Exact polynomial and first-order differential-operator algebra, and the
//! identities for inverse coordinates, `w_kn`, `ln Δ` and the right generators.

pub mod formulas;
pub mod ladder;
pub mod lemmas;
pub mod operator;
pub mod poly;

pub use formulas::{
    inverse_coordinate_closed, inverse_coordinate_recursive, ln_delta_poly, neg_ln_delta_poly, right_generator,
    substitute_left, substitute_right, symbolic_matrix, w_poly, InverseTable,
};
pub use ladder::{ladder, ladder_with_order, LadderOrder, LadderReport};
pub use operator::DiffOperator;
pub use poly::{CompiledPolynomial, Monomial, Polynomial, Variable};
