//! Exact and numerical verification tools for the regular representations of
//! finite unipotent groups `B(N)` with Gaussian product measures.

pub mod error;
pub mod group;
pub mod measure;
pub mod representation;
pub mod symbolic;

pub use error::{GroupError, MeasureError, RepresentationError, SymbolicError};
pub use group::{TriangularIndex, UnipotentMatrix};
