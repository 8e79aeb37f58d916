//! Dense linear algebra for small symmetric problems.
//!
//! Everything here is sized for LMI blocks of at most a few dozen rows: full
//! dense storage, Cholesky factorization and cyclic Jacobi eigen-decomposition.

mod cholesky;
mod eig;
mod matrix;
mod sym;

pub use cholesky::{cholesky, solve_spd, Cholesky};
pub use eig::{max_eigenvalue, min_eigenvalue, sqrt_psd, sym_eig, SymEigen};
pub use matrix::{dot, norm2, Matrix};
pub use sym::SymMatrix;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix is not positive definite (pivot {pivot})")]
    NotPositiveDefinite { pivot: usize },
    #[error("Jacobi eigen-solver did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix has no entries")]
    Empty,
    #[error("matrix contains non-finite entries")]
    NonFinite,
}
