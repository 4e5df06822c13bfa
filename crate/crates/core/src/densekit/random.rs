//! Seeded random matrices for tests, fixtures and benchmarks.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::matrix::DenseMatrix;

pub type MatrixRng = ChaCha8Rng;

/// Platform-independent generator for a fixed seed.
pub fn seeded(seed: u64) -> MatrixRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard normal entries; imaginary parts are drawn too when `complex`.
pub fn gaussian<R: Rng>(nrows: usize, ncols: usize, complex: bool, rng: &mut R) -> DenseMatrix {
    DenseMatrix::from_fn(nrows, ncols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = if complex { rng.sample(StandardNormal) } else { 0.0 };
        Complex64::new(re, im)
    })
}

/// Uniform integer entries in `lo..=hi`.
pub fn integer<R: Rng>(nrows: usize, ncols: usize, lo: i64, hi: i64, rng: &mut R) -> DenseMatrix {
    DenseMatrix::from_fn(nrows, ncols, |_, _| Complex64::new(rng.random_range(lo..=hi) as f64, 0.0))
}

/// Real symmetric matrix `(G + G^T) / 2` with standard normal `G`.
pub fn symmetric<R: Rng>(n: usize, rng: &mut R) -> DenseMatrix {
    let g = gaussian(n, n, false, rng);
    DenseMatrix::from_fn(n, n, |i, j| (g[(i, j)] + g[(j, i)]) * 0.5)
}
