//! Eigenvalues, eigenvectors and Jordan structure of low-rank matrices.
//!
//! A matrix `X = A B` with `A: N x r`, `B: r x N` and `r << N` shares its
//! nonzero eigenvalues with the small `r x r` product `B A`. The crate solves
//! the small problem and lifts eigenvectors and Jordan chains back through
//! `A`, never forming the `N x N` matrix.
//!
//! * [`lowrank`]: the general path, residuals and the flop model.
//! * [`symmetric`]: the symmetry-preserving path for `X = A S A^*`.
//! * [`jordan`]: zero-eigenvalue Jordan structure of `A B` predicted from
//!   `B A`, with a brute-force verifier.
//! * [`factorize`]: producing factors from a dense matrix.
//! * [`densekit`]: the dense kernels underneath.
//!
//! Singular values of `A B` and `B A` are unrelated, zero or not; only the
//! eigenvalues carry over.

pub mod densekit;
pub mod error;
pub mod factorize;
pub mod jordan;
pub mod lowrank;
pub mod symmetric;

pub use densekit::{DenseMatrix, ToleranceConfig};
pub use error::{LinalgError, Result};
pub use factorize::{rank_reduce, symmetric_factor, truncated_svd_factor};
pub use jordan::{verify_structure, JordanStructure, WeyrSequence};
pub use lowrank::{lowrank_eig, EigenResult, FactorPair, JordanChain};
pub use num_complex::Complex64;
pub use symmetric::{symmetric_factored_eig, SymmetricFactorization};
