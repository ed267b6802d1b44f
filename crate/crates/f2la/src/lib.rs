//! Dense linear algebra over GF(2): bit vectors and matrices, row reduction
//! with a recorded transform, null spaces, and affine subspaces.
//!
//! Pivoting is deterministic (leftmost column, then topmost row), so every
//! result is reproducible bit for bit.

mod affine;
mod incremental;
mod matrix;
mod vector;

pub use affine::{affine_intersect, solve_affine, AffineSubspace};
pub use incremental::{Echelon, Pushed};
pub use matrix::{null_space, rref, rref_only, BitMatrix, Rref};
pub use vector::BitVector;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum F2Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
}
