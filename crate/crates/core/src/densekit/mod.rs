//! Dense matrix kernels and small-matrix decompositions.
//!
//! Everything operates on [`DenseMatrix`], a column-major complex matrix.
//! Real data is carried with zero imaginary parts; the symmetric kernels keep
//! such data exactly real.

pub mod cholesky;
pub mod eig;
pub mod flops;
pub mod hermitian;
pub mod matrix;
pub mod ops;
pub mod qr;
pub mod random;
pub mod svd;
pub mod tolerance;

pub use cholesky::{cholesky, solve_lower, solve_lower_adjoint};
pub use eig::{eig_dense, Eig};
pub use hermitian::{symmetric_eig, SymmetricEig};
pub use matrix::{dotc, norm2, DenseMatrix};
pub use ops::{adjoint_matmul, eigen_residual, matmul, matmul_adjoint, matmul_flops, matpow};
pub use qr::{qr_thin, solve, ThinQr};
pub use svd::{numeric_rank, singular_values, svd, Svd};
pub use tolerance::{ToleranceConfig, EPS};
