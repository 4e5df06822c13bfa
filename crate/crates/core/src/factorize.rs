//! Producing low-rank factors from dense input, and trimming factors that
//! carry more inner dimension than their product needs.

use num_complex::Complex64;

use crate::densekit::svd::rank_from_sigma;
use crate::densekit::{matmul, matmul_adjoint, qr_thin, svd, symmetric_eig, DenseMatrix, ToleranceConfig};
use crate::error::{LinalgError, Result};
use crate::lowrank::FactorPair;
use crate::symmetric::SymmetricFactorization;

/// Truncated SVD factors `A = U_r diag(σ_r)`, `B = Vh_r`.
#[derive(Debug, Clone)]
pub struct TruncatedFactor {
    pub pair: FactorPair,
    /// `sqrt(sum of discarded σ^2)`, the Frobenius error of the truncation.
    pub discarded: f64,
    /// Set when a requested rank exceeded the numeric rank and was lowered.
    pub warning: Option<RankWarning>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankWarning {
    pub requested: usize,
    pub numeric_rank: usize,
    /// Frobenius error achieved at the numeric rank.
    pub achieved_error: f64,
}

impl std::fmt::Display for RankWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "requested rank {} exceeds numeric rank {}; factored at rank {} with error {:e}",
            self.requested, self.numeric_rank, self.numeric_rank, self.achieved_error
        )
    }
}

fn tail_norm(sigma: &[f64], k: usize) -> f64 {
    sigma[k.min(sigma.len())..].iter().map(|s| s * s).sum::<f64>().sqrt()
}

fn require_square(x: &DenseMatrix, op: &'static str) -> Result<()> {
    if x.is_square() {
        Ok(())
    } else {
        Err(LinalgError::NotSquare {
            op,
            rows: x.nrows(),
            cols: x.ncols(),
        })
    }
}

/// Factors a square `X` at the given rank, or at its numeric rank.
///
/// A rank above the numeric rank is lowered to it and reported in
/// [`TruncatedFactor::warning`], so both factors always have full rank.
pub fn truncated_svd_factor(x: &DenseMatrix, rank: Option<usize>, cfg: &ToleranceConfig) -> Result<TruncatedFactor> {
    require_square(x, "truncated_svd_factor")?;
    let n = x.nrows();
    if let Some(k) = rank {
        if k > n {
            return Err(LinalgError::InvalidArgument(format!("rank {k} exceeds N = {n}")));
        }
    }
    let s = svd(x)?;
    let numeric = rank_from_sigma(&s.sigma, cfg.rank_cutoff(n, n));
    let (k, warning) = match rank {
        Some(k) if k > numeric => (
            numeric,
            Some(RankWarning {
                requested: k,
                numeric_rank: numeric,
                achieved_error: tail_norm(&s.sigma, numeric),
            }),
        ),
        Some(k) => (k, None),
        None => (numeric, None),
    };
    let cols: Vec<usize> = (0..k).collect();
    let sigma: Vec<Complex64> = s.sigma[..k].iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let a = s.u.select_columns(&cols).scale_columns(&sigma);
    let b = s.vh.select_rows(&cols);
    Ok(TruncatedFactor {
        pair: FactorPair::new(a, b)?,
        discarded: tail_norm(&s.sigma, k),
        warning,
    })
}

/// `X = Ã S̃ Ã^*` from the nonzero part of the eigendecomposition of a
/// Hermitian `X`, ordered by decreasing `|λ|`.
pub fn symmetric_factor(x: &DenseMatrix, cfg: &ToleranceConfig) -> Result<SymmetricFactorization> {
    require_square(x, "symmetric_factor")?;
    let n = x.nrows();
    let eig = symmetric_eig(x)?;
    let top = eig.eigenvalues.iter().fold(0.0f64, |m, l| m.max(l.abs()));
    let cutoff = cfg.rank_cutoff(n, n) * top;
    let mut keep: Vec<usize> = (0..n).filter(|&i| eig.eigenvalues[i].abs() > cutoff).collect();
    keep.sort_by(|&i, &j| eig.eigenvalues[j].abs().total_cmp(&eig.eigenvalues[i].abs()));
    let d: Vec<f64> = keep.iter().map(|&i| eig.eigenvalues[i]).collect();
    SymmetricFactorization::new(eig.q.select_columns(&keep), DenseMatrix::from_real_diagonal(&d), cfg)
}

/// Factors of minimal inner dimension with the same product.
///
/// Works on `A = Q_a R_a`, `B^* = Q_b R_b` and the SVD of the small core
/// `R_a R_b^*`, never on `N x N` data. Factors that are already minimal are
/// returned unchanged.
pub fn rank_reduce(f: &FactorPair, cfg: &ToleranceConfig) -> Result<FactorPair> {
    let (n, r) = (f.n(), f.rank());
    if r == 0 {
        return Ok(f.clone());
    }
    let qa = qr_thin(f.a());
    let qb = qr_thin(&f.b().adjoint());
    let core = matmul_adjoint(&qa.r, &qb.r)?;
    let s = svd(&core)?;
    let k = rank_from_sigma(&s.sigma, cfg.rank_cutoff(n, n));
    if k == r {
        return Ok(f.clone());
    }
    let cols: Vec<usize> = (0..k).collect();
    let sigma: Vec<Complex64> = s.sigma[..k].iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let a = matmul(&qa.q, &s.u.select_columns(&cols).scale_columns(&sigma))?;
    let b = matmul_adjoint(&s.vh.select_rows(&cols), &qb.q)?;
    FactorPair::new(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densekit::random::{gaussian, seeded};
    use crate::densekit::{numeric_rank, singular_values};
    use crate::lowrank::lowrank_eig;
    use proptest::prelude::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn truncated_e1() {
        let x = DenseMatrix::from_fn(3, 3, |i, j| c(if i == 0 && j == 0 { 1.0 } else { 0.0 }));
        let t = truncated_svd_factor(&x, Some(1), &ToleranceConfig::default()).unwrap();
        let (a, b) = (t.pair.a(), t.pair.b());
        assert_eq!(a.norm_fro(), 1.0);
        assert_eq!(a[(0, 0)].norm(), 1.0);
        assert_eq!(b[(0, 0)].norm(), 1.0);
        assert_eq!(t.pair.to_dense(), x);
    }

    #[test]
    fn truncated_zero_is_rank_zero() {
        let cfg = ToleranceConfig::default();
        let t = truncated_svd_factor(&DenseMatrix::zeros(4, 4), None, &cfg).unwrap();
        assert_eq!(t.pair.rank(), 0);
        assert!(lowrank_eig(&t.pair, true, &cfg).unwrap().lambdas.is_empty());
    }

    #[test]
    fn truncated_random_low_rank() {
        let cfg = ToleranceConfig::default();
        let mut rng = seeded(12);
        let x = matmul(&gaussian(20, 4, false, &mut rng), &gaussian(4, 20, false, &mut rng)).unwrap();
        let t = truncated_svd_factor(&x, Some(4), &cfg).unwrap();
        assert!(t.pair.to_dense().sub(&x).unwrap().norm_fro() <= 1e-12 * x.norm_fro());
        assert!(t.warning.is_none());
        assert_eq!(numeric_rank(t.pair.a(), &cfg).unwrap(), 4);
    }

    #[test]
    fn truncated_rank_above_numeric_warns() {
        let cfg = ToleranceConfig::default();
        let mut rng = seeded(13);
        let x = matmul(&gaussian(10, 2, false, &mut rng), &gaussian(2, 10, false, &mut rng)).unwrap();
        let t = truncated_svd_factor(&x, Some(5), &cfg).unwrap();
        let w = t.warning.unwrap();
        assert_eq!((w.requested, w.numeric_rank), (5, 2));
        assert!(w.achieved_error <= 1e-12 * x.norm_fro());
        assert_eq!(t.pair.rank(), 2);
    }

    #[test]
    fn truncation_error_is_discarded_tail() {
        let cfg = ToleranceConfig::default();
        let x = DenseMatrix::from_real_diagonal(&[3.0, 2.0, 1.0]);
        let t = truncated_svd_factor(&x, Some(1), &cfg).unwrap();
        let err = t.pair.to_dense().sub(&x).unwrap().norm_fro();
        assert!((t.discarded - 5f64.sqrt()).abs() < 1e-15);
        assert!(err <= t.discarded * (1.0 + 1e-12));
    }

    #[test]
    fn symmetric_factor_examples() {
        let cfg = ToleranceConfig::default();
        let f = symmetric_factor(&DenseMatrix::from_real_diagonal(&[2.0, -3.0, 0.0]), &cfg).unwrap();
        assert_eq!(f.stilde(), &DenseMatrix::from_real_diagonal(&[-3.0, 2.0]));
        let abs = DenseMatrix::from_fn(3, 2, |i, j| c(f.atilde()[(i, j)].norm()));
        assert_eq!(abs, DenseMatrix::from_real_rows(&[[0.0, 1.0], [1.0, 0.0], [0.0, 0.0]]));

        let f = symmetric_factor(&DenseMatrix::identity(2), &cfg).unwrap();
        assert_eq!(f.stilde(), &DenseMatrix::identity(2));
        let g = crate::densekit::adjoint_matmul(f.atilde(), f.atilde()).unwrap();
        assert!(g.sub(&DenseMatrix::identity(2)).unwrap().norm_max() < 1e-15);
    }

    #[test]
    fn symmetric_factor_random_rank_three() {
        let cfg = ToleranceConfig::default();
        let mut rng = seeded(31);
        let g = gaussian(15, 3, false, &mut rng);
        let s = DenseMatrix::from_real_diagonal(&[2.0, -1.0, 0.5]);
        let x = matmul_adjoint(&matmul(&g, &s).unwrap(), &g).unwrap();
        let f = symmetric_factor(&x, &cfg).unwrap();
        assert_eq!(f.rank(), 3);
        assert!(f.to_dense().sub(&x).unwrap().norm_fro() <= 1e-11 * x.norm_fro());
    }

    #[test]
    fn symmetric_factor_rejects_asymmetric() {
        let x = DenseMatrix::from_real_rows(&[[1.0, 2.0], [0.0, 1.0]]);
        assert!(matches!(
            symmetric_factor(&x, &ToleranceConfig::default()),
            Err(LinalgError::NotHermitian { .. })
        ));
    }

    #[test]
    fn rank_reduce_examples() {
        let cfg = ToleranceConfig::default();
        let mut rng = seeded(17);
        let full = FactorPair::new(gaussian(8, 3, false, &mut rng), gaussian(3, 8, false, &mut rng)).unwrap();
        assert_eq!(rank_reduce(&full, &cfg).unwrap(), full);

        // Duplicated column of A.
        let a0 = gaussian(8, 2, false, &mut rng);
        let a = DenseMatrix::from_columns(8, &[a0.column(0), a0.column(1), a0.column(0)]);
        let f = FactorPair::new(a, gaussian(3, 8, false, &mut rng)).unwrap();
        let g = rank_reduce(&f, &cfg).unwrap();
        assert_eq!(g.rank(), 2);
        let bound = 1e-11 * f.a().norm_fro() * f.b().norm_fro();
        assert!(g.to_dense().sub(&f.to_dense()).unwrap().norm_fro() <= bound);

        // A = [a, a], B = [b^T; b^T]: A B = 2 a b^T.
        let av = gaussian(6, 1, false, &mut rng);
        let bv = gaussian(1, 6, false, &mut rng);
        let a = DenseMatrix::from_columns(6, &[av.column(0), av.column(0)]);
        let b = DenseMatrix::from_fn(2, 6, |_, j| bv[(0, j)]);
        let f = FactorPair::new(a, b).unwrap();
        let g = rank_reduce(&f, &cfg).unwrap();
        assert_eq!(g.rank(), 1);
        let oracle = matmul(&av, &bv).unwrap().scale(c(2.0));
        assert!(g.to_dense().sub(&oracle).unwrap().norm_fro() <= 1e-11 * oracle.norm_fro());
    }

    #[test]
    fn rank_reduce_handles_wide_factors() {
        let cfg = ToleranceConfig::default();
        let mut rng = seeded(18);
        let f = FactorPair::new(gaussian(3, 5, true, &mut rng), gaussian(5, 3, true, &mut rng)).unwrap();
        let g = rank_reduce(&f, &cfg).unwrap();
        assert_eq!(g.rank(), 3);
        assert!(g.to_dense().sub(&f.to_dense()).unwrap().norm_fro() <= 1e-11 * f.norm_bound());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn truncated_round_trip(seed in any::<u64>(), n in 2usize..40, k in 1usize..6) {
            let k = k.min(n);
            let cfg = ToleranceConfig::default();
            let mut rng = seeded(seed);
            let x = matmul(&gaussian(n, k, false, &mut rng), &gaussian(k, n, false, &mut rng)).unwrap();
            let t = truncated_svd_factor(&x, None, &cfg).unwrap();
            let err = t.pair.to_dense().sub(&x).unwrap().norm_fro();
            let sigma = singular_values(&x).unwrap();
            let bound = tail_norm(&sigma, t.pair.rank()) * (1.0 + 1e-12) + 1e-13 * x.norm_fro();
            prop_assert!(err <= bound, "err {err} bound {bound}");
        }

        #[test]
        fn rank_reduce_preserves_product(seed in any::<u64>(), n in 3usize..20, k in 1usize..4, extra in 0usize..3) {
            let cfg = ToleranceConfig::default();
            let mut rng = seeded(seed);
            // r = k + extra inner columns, but the product has rank k.
            let core = gaussian(k, k + extra, false, &mut rng);
            let a = matmul(&gaussian(n, k, false, &mut rng), &core).unwrap();
            let f = FactorPair::new(a, gaussian(k + extra, n, false, &mut rng)).unwrap();
            let g = rank_reduce(&f, &cfg).unwrap();
            prop_assert!(g.rank() <= f.rank());
            prop_assert!(g.to_dense().sub(&f.to_dense()).unwrap().norm_fro() <= 1e-11 * f.norm_bound());
            prop_assert_eq!(rank_reduce(&g, &cfg).unwrap(), g);
        }
    }
}
