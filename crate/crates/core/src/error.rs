use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the dense kernels and the low-rank algorithms built on them.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch in {op}: left is {left_rows}x{left_cols}, right is {right_rows}x{right_cols}")]
    DimensionMismatch {
        op: &'static str,
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },

    #[error("{op} requires a square matrix, got {rows}x{cols}")]
    NotSquare {
        op: &'static str,
        rows: usize,
        cols: usize,
    },

    #[error("matrix data has {got} entries, expected {expected}")]
    BadLength { expected: usize, got: usize },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("{op} did not converge after {iterations} iterations (off-diagonal residual {residual:e})")]
    NoConvergence {
        op: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("matrix is not Hermitian: asymmetry {asymmetry:e} exceeds {tolerance:e}")]
    NotHermitian { asymmetry: f64, tolerance: f64 },

    #[error("matrix is not positive definite: pivot {pivot} has value {value:e}")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("matrix is singular to working precision (pivot {pivot})")]
    Singular { pivot: usize },

    #[error("congruence factor is ill-conditioned (condition estimate {condition:e})")]
    IllConditioned { condition: f64 },

    #[error("middle factor is singular or rank deficient (rank {rank} of {expected}); reduce the rank of the factorization first")]
    SingularMiddleFactor { rank: usize, expected: usize },

    #[error("factor has numeric rank {rank}, expected full rank {expected}; apply rank reduction first")]
    RankDeficient { rank: usize, expected: usize },

    #[error("eigenvalue {0} is numerically zero; zero-eigenvalue chains are handled by the jordan module")]
    ZeroEigenvalue(Complex64),

    #[error("chain residual {residual:e} exceeds tolerance {tolerance:e}")]
    InvalidChain { residual: f64, tolerance: f64 },

    #[error("vector must be nonzero")]
    ZeroVector,

    #[error("vectors are not orthogonal: inner product {inner:e}")]
    NotOrthogonal { inner: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("zero block count {blocks} exceeds N - r = {limit}; the full-rank assumption rank(A) = rank(B) = r is violated")]
    TooManyZeroBlocks { blocks: usize, limit: usize },

    #[error("ambiguous rank decision: singular value {sigma:e} lies within the guard band around cutoff {cutoff:e}")]
    AmbiguousRank { sigma: f64, cutoff: f64 },

    #[error("nullity sequence did not stabilize within {kmax} powers: {partial:?}")]
    NotStabilized { kmax: usize, partial: Vec<usize> },

    #[error("malformed nullity sequence {0:?}")]
    MalformedWeyr(Vec<usize>),
}

pub type Result<T> = std::result::Result<T, LinalgError>;
