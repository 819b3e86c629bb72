//! Complex linear algebra, seeded Gaussian sampling and exact rationals.

mod matrix;
mod qr;
mod rational;
mod rng;

pub use matrix::{CMatrix, C64};
pub use qr::{
    cholesky, log2_det_identity_plus_gram, orthogonal_complement, rank, row_space_leverage,
    solve_least_squares, solve_least_squares_tol, solve_lower_triangular, ColPivQr, LeastSquares,
    DEFAULT_REL_TOL,
};
pub use rational::{rational, Rational};
pub use rng::{gaussian_matrix, SeededRng};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("non-finite matrix entry")]
    NonFinite,
    #[error("matrix is not Hermitian positive definite")]
    NotPositiveDefinite,
}
