//! Nonzero eigenpairs and Jordan chains of `X = A B` from the small product
//! `B A`.
//!
//! If `B A v = lambda v` with `lambda != 0` then `A B (A v) = lambda (A v)`
//! and `A v != 0`; the same lifting carries Jordan chains of `B A` to Jordan
//! chains of `A B` of equal length. Nothing here forms the `N x N` product
//! except [`FactorPair::to_dense`], which exists for desk-scale checks.

use num_complex::Complex64;

use crate::densekit::{
    self, eig_dense, flops, matmul, norm2, numeric_rank, DenseMatrix, ToleranceConfig,
};
use crate::error::{LinalgError, Result};

/// Low-rank representation `X = A B` with `A: N x r` and `B: r x N`.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorPair {
    a: DenseMatrix,
    b: DenseMatrix,
}

impl FactorPair {
    pub fn new(a: DenseMatrix, b: DenseMatrix) -> Result<Self> {
        if a.ncols() != b.nrows() || a.nrows() != b.ncols() {
            return Err(LinalgError::DimensionMismatch {
                op: "FactorPair::new",
                left_rows: a.nrows(),
                left_cols: a.ncols(),
                right_rows: b.nrows(),
                right_cols: b.ncols(),
            });
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> &DenseMatrix {
        &self.a
    }

    pub fn b(&self) -> &DenseMatrix {
        &self.b
    }

    pub fn into_parts(self) -> (DenseMatrix, DenseMatrix) {
        (self.a, self.b)
    }

    /// Outer dimension `N`.
    pub fn n(&self) -> usize {
        self.a.nrows()
    }

    /// Inner dimension `r`.
    pub fn rank(&self) -> usize {
        self.a.ncols()
    }

    pub fn is_real(&self) -> bool {
        self.a.is_real() && self.b.is_real()
    }

    /// Factors of `X^T = B^T A^T`.
    pub fn transposed(&self) -> Self {
        Self {
            a: self.b.transpose(),
            b: self.a.transpose(),
        }
    }

    /// `||A||_F ||B||_F`, an upper bound on `||A B||_F`.
    pub fn norm_bound(&self) -> f64 {
        self.a.norm_fro() * self.b.norm_fro()
    }

    /// `A (B x)` in `O(N r)` work.
    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.a.mul_vec(&self.b.mul_vec(x))
    }

    /// The explicit `N x N` product. Desk-scale oracles only.
    pub fn to_dense(&self) -> DenseMatrix {
        matmul(&self.a, &self.b).expect("validated factor shapes")
    }
}

/// Why an otherwise successful eigensolve deserves attention.
#[derive(Debug, Clone, PartialEq)]
pub enum EigWarning {
    /// `B A` is numerically singular: a lower-rank factorization exists.
    RankDeficient { rank: usize, inner: usize },
    /// A lifted eigenpair misses the residual tolerance.
    ResidualAboveTolerance { index: usize, residual: f64 },
    /// `r > N`: the `N x N` product was solved directly instead.
    WideFactors { n: usize, inner: usize },
}

/// Nonzero eigenvalues of `A B` with optional small and lifted eigenvectors.
#[derive(Debug, Clone)]
pub struct EigenResult {
    /// Nonzero eigenvalues, ordered by decreasing modulus.
    pub lambdas: Vec<Complex64>,
    /// Unit eigenvectors of `B A`, one column per eigenvalue (`r x r0`).
    pub v: Option<DenseMatrix>,
    /// Lifted eigenvectors `W = A V` of `A B` (`N x r0`), unnormalized.
    pub w: Option<DenseMatrix>,
    /// Normalized residual of each column of `W`; empty without vectors.
    pub residuals: Vec<f64>,
    /// Number of eigenvalues of `B A` filtered as numerically zero.
    pub dropped: usize,
    /// Threshold that separated zero from nonzero eigenvalues.
    pub threshold: f64,
    pub warnings: Vec<EigWarning>,
}

impl EigenResult {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }

    /// True when every residual is within `cfg.residual_rtol`.
    pub fn accepted(&self, cfg: &ToleranceConfig) -> bool {
        self.residuals.iter().all(|&r| r <= cfg.residual_rtol)
    }

    /// Scales each lifted eigenvector to unit length.
    pub fn normalize_vectors(&mut self) {
        if let Some(w) = self.w.as_mut() {
            let scales: Vec<Complex64> = (0..w.ncols())
                .map(|j| Complex64::new(1.0 / norm2(w.column(j)), 0.0))
                .collect();
            *w = w.scale_columns(&scales);
        }
    }
}

/// `B A`. Records `2 N r^2` flops.
pub fn small_product(f: &FactorPair) -> DenseMatrix {
    matmul(&f.b, &f.a).expect("validated factor shapes")
}

/// Indices of eigenvalues with `|lambda| > zero_eig_atol * scale`, in input order.
pub fn nonzero_filter(eigenvalues: &[Complex64], scale: f64, cfg: &ToleranceConfig) -> Vec<usize> {
    let threshold = cfg.zero_eig_atol * scale;
    eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, l)| l.norm() > threshold)
        .map(|(i, _)| i)
        .collect()
}

/// `W = A V`.
pub fn lift(a: &DenseMatrix, v: &DenseMatrix) -> Result<DenseMatrix> {
    matmul(a, v)
}

/// `||A (B w) - lambda w|| / (||A||_F ||B||_F ||w||)` without forming `A B`.
pub fn residual(f: &FactorPair, lambda: Complex64, w: &[Complex64]) -> Result<f64> {
    if w.len() != f.n() {
        return Err(LinalgError::DimensionMismatch {
            op: "residual",
            left_rows: f.n(),
            left_cols: f.n(),
            right_rows: w.len(),
            right_cols: 1,
        });
    }
    let wn = norm2(w);
    if wn == 0.0 {
        return Err(LinalgError::ZeroVector);
    }
    let mut r = f.apply(w);
    for (ri, wi) in r.iter_mut().zip(w) {
        *ri -= lambda * wi;
    }
    let num = norm2(&r);
    if num == 0.0 {
        return Ok(0.0);
    }
    Ok(num / (f.norm_bound() * wn))
}

fn by_decreasing_modulus(values: &[Complex64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| {
        let (a, b) = (values[i], values[j]);
        b.norm()
            .total_cmp(&a.norm())
            .then(b.re.total_cmp(&a.re))
            .then(b.im.total_cmp(&a.im))
    });
    order
}

/// Nonzero eigenvalues (and optionally eigenvectors) of `A B` through `B A`.
///
/// Work is `O(N r^2 + r^3)` and storage `O(N r + r^2)`.
pub fn lowrank_eig(f: &FactorPair, want_vectors: bool, cfg: &ToleranceConfig) -> Result<EigenResult> {
    let (n, r) = (f.n(), f.rank());
    let mut warnings = Vec::new();
    if r > n {
        warnings.push(EigWarning::WideFactors { n, inner: r });
        return wide_eig(f, want_vectors, cfg, warnings);
    }

    let ba = small_product(f);
    let scale = ba.norm_fro();
    let eig = eig_dense(&ba, want_vectors)?;
    let keep = nonzero_filter(&eig.eigenvalues, scale, cfg);
    let kept: Vec<Complex64> = keep.iter().map(|&i| eig.eigenvalues[i]).collect();
    let order: Vec<usize> = by_decreasing_modulus(&kept).into_iter().map(|k| keep[k]).collect();

    let small_rank = numeric_rank(&ba, cfg)?;
    if small_rank < r {
        warnings.push(EigWarning::RankDeficient { rank: small_rank, inner: r });
    }

    let lambdas: Vec<Complex64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let (v, w, residuals) = match eig.vectors {
        Some(vectors) => {
            let v = vectors.select_columns(&order);
            let w = lift(&f.a, &v)?;
            let residuals = column_residuals(f, &lambdas, &w)?;
            (Some(v), Some(w), residuals)
        }
        None => (None, None, Vec::new()),
    };
    flag_residuals(&residuals, cfg, &mut warnings);
    Ok(EigenResult {
        dropped: r - lambdas.len(),
        lambdas,
        v,
        w,
        residuals,
        threshold: cfg.zero_eig_atol * scale,
        warnings,
    })
}

/// `r > N`: `A B` is the smaller product, so solve it directly and map its
/// eigenvectors to those of `B A` through `B`.
fn wide_eig(
    f: &FactorPair,
    want_vectors: bool,
    cfg: &ToleranceConfig,
    mut warnings: Vec<EigWarning>,
) -> Result<EigenResult> {
    let x = f.to_dense();
    let scale = x.norm_fro();
    let eig = eig_dense(&x, want_vectors)?;
    let keep = nonzero_filter(&eig.eigenvalues, scale, cfg);
    let kept: Vec<Complex64> = keep.iter().map(|&i| eig.eigenvalues[i]).collect();
    let order: Vec<usize> = by_decreasing_modulus(&kept).into_iter().map(|k| keep[k]).collect();
    let lambdas: Vec<Complex64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let (v, w, residuals) = match eig.vectors {
        Some(vectors) => {
            let w = vectors.select_columns(&order);
            let v = matmul(&f.b, &w)?;
            let residuals = column_residuals(f, &lambdas, &w)?;
            (Some(v), Some(w), residuals)
        }
        None => (None, None, Vec::new()),
    };
    flag_residuals(&residuals, cfg, &mut warnings);
    Ok(EigenResult {
        dropped: f.rank() - lambdas.len(),
        lambdas,
        v,
        w,
        residuals,
        threshold: cfg.zero_eig_atol * scale,
        warnings,
    })
}

fn column_residuals(f: &FactorPair, lambdas: &[Complex64], w: &DenseMatrix) -> Result<Vec<f64>> {
    lambdas
        .iter()
        .enumerate()
        .map(|(j, &l)| residual(f, l, w.column(j)))
        .collect()
}

fn flag_residuals(residuals: &[f64], cfg: &ToleranceConfig, warnings: &mut Vec<EigWarning>) {
    for (index, &residual) in residuals.iter().enumerate() {
        if residual > cfg.residual_rtol {
            warnings.push(EigWarning::ResidualAboveTolerance { index, residual });
        }
    }
}

/// Vectors `v_1..v_k` with `M v_1 = lambda v_1` and
/// `M v_{j+1} = lambda v_{j+1} + v_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct JordanChain {
    pub eigenvalue: Complex64,
    /// Columns `v_1..v_k`.
    pub vectors: DenseMatrix,
}

impl JordanChain {
    pub fn new(eigenvalue: Complex64, vectors: DenseMatrix) -> Self {
        Self { eigenvalue, vectors }
    }

    pub fn len(&self) -> usize {
        self.vectors.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.ncols() == 0
    }

    /// Worst normalized recurrence defect against an explicit matrix.
    pub fn residual_against(&self, m: &DenseMatrix) -> Result<f64> {
        if !m.is_square() || m.nrows() != self.vectors.nrows() {
            return Err(LinalgError::DimensionMismatch {
                op: "JordanChain::residual_against",
                left_rows: m.nrows(),
                left_cols: m.ncols(),
                right_rows: self.vectors.nrows(),
                right_cols: self.vectors.ncols(),
            });
        }
        Ok(self.recurrence_defect(|x| m.mul_vec(x), m.norm_fro()))
    }

    /// Worst normalized recurrence defect against `A B`, applied through the factors.
    pub fn residual_factored(&self, f: &FactorPair) -> Result<f64> {
        if self.vectors.nrows() != f.n() {
            return Err(LinalgError::DimensionMismatch {
                op: "JordanChain::residual_factored",
                left_rows: f.n(),
                left_cols: f.n(),
                right_rows: self.vectors.nrows(),
                right_cols: self.vectors.ncols(),
            });
        }
        Ok(self.recurrence_defect(|x| f.apply(x), f.norm_bound()))
    }

    /// `max_j ||M v_j - lambda v_j - v_{j-1}|| / ((||M|| + |lambda|) ||v_j|| + ||v_{j-1}||)`.
    fn recurrence_defect(&self, apply: impl Fn(&[Complex64]) -> Vec<Complex64>, mnorm: f64) -> f64 {
        let scale = mnorm + self.eigenvalue.norm();
        let mut worst: f64 = 0.0;
        for j in 0..self.len() {
            let vj = self.vectors.column(j);
            let mut r = apply(vj);
            for (ri, x) in r.iter_mut().zip(vj) {
                *ri -= self.eigenvalue * x;
            }
            let mut denom = scale * norm2(vj);
            if j > 0 {
                let prev = self.vectors.column(j - 1);
                for (ri, x) in r.iter_mut().zip(prev) {
                    *ri -= x;
                }
                denom += norm2(prev);
            }
            let num = norm2(&r);
            if num > 0.0 {
                worst = worst.max(num / denom.max(f64::MIN_POSITIVE));
            }
        }
        worst
    }

    /// Checks the recurrence and full column rank against `m`.
    pub fn validate_against(&self, m: &DenseMatrix, cfg: &ToleranceConfig) -> Result<()> {
        let residual = self.residual_against(m)?;
        if residual > cfg.residual_rtol {
            return Err(LinalgError::InvalidChain {
                residual,
                tolerance: cfg.residual_rtol,
            });
        }
        let rank = numeric_rank(&self.vectors, cfg)?;
        if rank != self.len() {
            return Err(LinalgError::RankDeficient {
                rank,
                expected: self.len(),
            });
        }
        Ok(())
    }
}

/// Lifts a Jordan chain of `B A` at a nonzero eigenvalue to one of `A B`.
pub fn lift_jordan_chain(f: &FactorPair, chain: &JordanChain, cfg: &ToleranceConfig) -> Result<JordanChain> {
    if chain.vectors.nrows() != f.rank() {
        return Err(LinalgError::DimensionMismatch {
            op: "lift_jordan_chain",
            left_rows: f.n(),
            left_cols: f.rank(),
            right_rows: chain.vectors.nrows(),
            right_cols: chain.vectors.ncols(),
        });
    }
    let ba = small_product(f);
    if nonzero_filter(&[chain.eigenvalue], ba.norm_fro(), cfg).is_empty() {
        return Err(LinalgError::ZeroEigenvalue(chain.eigenvalue));
    }
    chain.validate_against(&ba, cfg)?;

    let lifted = JordanChain::new(chain.eigenvalue, lift(&f.a, &chain.vectors)?);
    let rank = numeric_rank(&lifted.vectors, cfg)?;
    if rank != chain.len() {
        return Err(LinalgError::RankDeficient {
            rank,
            expected: chain.len(),
        });
    }
    let residual = lifted.residual_factored(f)?;
    if residual > cfg.residual_rtol {
        return Err(LinalgError::InvalidChain {
            residual,
            tolerance: cfg.residual_rtol,
        });
    }
    Ok(lifted)
}

/// `c` in the `c r^3` term as a fraction: `4/3` (symmetric) or `9` for
/// eigenvalues only; `9` or `25` with eigenvectors.
fn eig_constant(symmetric: bool, want_vectors: bool) -> (u128, u128) {
    match (symmetric, want_vectors) {
        (true, false) => (4, 3),
        (false, false) => (9, 1),
        (true, true) => (9, 1),
        (false, true) => (25, 1),
    }
}

/// Nearest integer to `num / den`, halves rounded up.
fn round_ratio(num: u128, den: u128) -> u64 {
    ((2 * num + den) / (2 * den)) as u64
}

/// Model cost `2 N r^2 + c r^3` of the low-rank path, rounded to an integer.
pub fn flop_model(n: usize, r: usize, symmetric: bool, want_vectors: bool) -> Result<u64> {
    if n == 0 || r == 0 {
        return Err(LinalgError::InvalidArgument(format!(
            "flop model needs positive N and r, got N = {n}, r = {r}"
        )));
    }
    if r > n {
        return Err(LinalgError::InvalidArgument(format!("r = {r} exceeds N = {n}")));
    }
    let (num, den) = eig_constant(symmetric, want_vectors);
    let (n, r) = (n as u128, r as u128);
    Ok(round_ratio(2 * n * r * r * den + num * r * r * r, den))
}

/// Model cost `c N^3` of a dense eigensolve of the explicit `N x N` matrix.
pub fn dense_flop_model(n: usize, symmetric: bool, want_vectors: bool) -> u64 {
    let (num, den) = eig_constant(symmetric, want_vectors);
    let n = n as u128;
    round_ratio(num * n * n * n, den)
}

/// Outcome of pairing two eigenvalue multisets.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumMatch {
    /// Largest pairwise distance divided by the reference spectral radius.
    pub max_relative_error: f64,
    /// `(computed, reference)` pairs.
    pub pairs: Vec<(Complex64, Complex64)>,
    pub same_size: bool,
}

impl SpectrumMatch {
    pub fn within(&self, rtol: f64) -> bool {
        self.same_size && self.max_relative_error <= rtol
    }
}

/// Pairs two multisets: both are sorted by `(re, im)`, then each computed
/// value takes its nearest unused reference value.
pub fn match_spectra(computed: &[Complex64], reference: &[Complex64]) -> SpectrumMatch {
    let lex = |a: &Complex64, b: &Complex64| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im));
    let mut c = computed.to_vec();
    let mut r = reference.to_vec();
    c.sort_by(lex);
    r.sort_by(lex);
    let radius = r
        .iter()
        .chain(&c)
        .map(|z| z.norm())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let mut used = vec![false; r.len()];
    let mut pairs = Vec::with_capacity(c.len());
    let mut worst: f64 = 0.0;
    for &x in &c {
        let best = (0..r.len())
            .filter(|&j| !used[j])
            .min_by(|&i, &j| (x - r[i]).norm().total_cmp(&(x - r[j]).norm()));
        if let Some(j) = best {
            used[j] = true;
            worst = worst.max((x - r[j]).norm() / radius);
            pairs.push((x, r[j]));
        }
    }
    SpectrumMatch {
        max_relative_error: worst,
        pairs,
        same_size: c.len() == r.len(),
    }
}

/// Nonzero eigenvalues of the explicit product, filtered against `||A B||_F`.
pub fn dense_nonzero_eigenvalues(x: &DenseMatrix, cfg: &ToleranceConfig) -> Result<Vec<Complex64>> {
    let eig = densekit::eig_dense(x, false)?;
    let keep = nonzero_filter(&eig.eigenvalues, x.norm_fro(), cfg);
    Ok(keep.into_iter().map(|i| eig.eigenvalues[i]).collect())
}

/// Convenience: flops recorded while forming `B A`.
pub fn small_product_flops(f: &FactorPair) -> u64 {
    flops::measure(|| small_product(f)).1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densekit::random::{gaussian, integer, seeded};
    use crate::densekit::ops::eigen_residual;
    use proptest::prelude::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn e1_pair(n: usize) -> FactorPair {
        let a = DenseMatrix::from_fn(n, 1, |i, _| c(if i == 0 { 1.0 } else { 0.0 }));
        FactorPair::new(a.clone(), a.adjoint()).unwrap()
    }

    /// A = [e1, e2] (4x2), B = [[2,1,0,0],[0,2,1,0]].
    fn chain_pair() -> FactorPair {
        let a = DenseMatrix::from_real_rows(&[[1.0, 0.0], [0.0, 1.0], [0.0, 0.0], [0.0, 0.0]]);
        let b = DenseMatrix::from_real_rows(&[[2.0, 1.0, 0.0, 0.0], [0.0, 2.0, 1.0, 0.0]]);
        FactorPair::new(a, b).unwrap()
    }

    fn orthogonal_rank_one() -> FactorPair {
        let a = DenseMatrix::from_real_rows(&[[1.0], [0.0]]);
        let b = DenseMatrix::from_real_rows(&[[0.0, 1.0]]);
        FactorPair::new(a, b).unwrap()
    }

    #[test]
    fn factor_pair_shape_checks() {
        assert!(FactorPair::new(DenseMatrix::zeros(3, 2), DenseMatrix::zeros(2, 4)).is_err());
        assert!(FactorPair::new(DenseMatrix::zeros(3, 2), DenseMatrix::zeros(3, 3)).is_err());
        let f = FactorPair::new(DenseMatrix::zeros(5, 2), DenseMatrix::zeros(2, 5)).unwrap();
        assert_eq!((f.n(), f.rank()), (5, 2));
    }

    #[test]
    fn small_product_examples() {
        assert_eq!(small_product(&e1_pair(3)), DenseMatrix::identity(1));

        let f = chain_pair();
        let expect = DenseMatrix::from_real_rows(&[[2.0, 1.0], [0.0, 2.0]]);
        let naive = DenseMatrix::from_fn(2, 2, |i, j| {
            (0..4).map(|p| f.b()[(i, p)] * f.a()[(p, j)]).sum()
        });
        assert_eq!(naive, expect);
        assert_eq!(small_product(&f), expect);

        assert_eq!(small_product(&orthogonal_rank_one()), DenseMatrix::zeros(1, 1));
    }

    #[test]
    fn small_product_records_two_n_r_squared() {
        let mut rng = seeded(1);
        let f = FactorPair::new(gaussian(30, 4, false, &mut rng), gaussian(4, 30, false, &mut rng)).unwrap();
        assert_eq!(small_product_flops(&f), 2 * 30 * 4 * 4);
    }

    #[test]
    fn nonzero_filter_examples() {
        let cfg = ToleranceConfig::default();
        assert_eq!(nonzero_filter(&[c(2.0), c(0.0)], 0.5, &cfg), vec![0]);
        let s = 3.7;
        assert!(nonzero_filter(&[c(1e-18 * s)], s, &cfg).is_empty());
        let e = eig_dense(&DenseMatrix::from_real_rows(&[[2.0, 1.0], [0.0, 2.0]]), false).unwrap();
        assert_eq!(nonzero_filter(&e.eigenvalues, 3.0, &cfg), vec![0, 1]);
    }

    #[test]
    fn lift_examples() {
        let a = DenseMatrix::from_fn(3, 1, |i, _| c(if i == 0 { 1.0 } else { 0.0 }));
        assert_eq!(lift(&a, &DenseMatrix::identity(1)).unwrap(), a);
        let f = chain_pair();
        assert_eq!(lift(f.a(), &DenseMatrix::identity(2)).unwrap(), f.a().clone());
        assert!(lift(f.a(), &DenseMatrix::identity(3)).is_err());
    }

    #[test]
    fn lifted_eigenvectors_have_small_residual_against_explicit_product() {
        let mut rng = seeded(42);
        let f = FactorPair::new(gaussian(6, 2, false, &mut rng), gaussian(2, 6, false, &mut rng)).unwrap();
        let e = eig_dense(&small_product(&f), true).unwrap();
        let w = lift(f.a(), e.vectors.as_ref().unwrap()).unwrap();
        let x = f.to_dense();
        for (j, &l) in e.eigenvalues.iter().enumerate() {
            let col = w.column(j);
            let mut r = x.mul_vec(col);
            for (ri, wi) in r.iter_mut().zip(col) {
                *ri -= l * wi;
            }
            assert!(norm2(&r) <= 1e-10 * f.a().norm_fro() * f.b().norm_fro() * norm2(col));
        }
    }

    #[test]
    fn lowrank_eig_e1() {
        let r = lowrank_eig(&e1_pair(3), true, &ToleranceConfig::default()).unwrap();
        assert_eq!(r.lambdas, vec![c(1.0)]);
        let w = r.w.unwrap();
        assert_eq!(w.column(0).iter().map(|z| z.norm()).collect::<Vec<_>>(), vec![1.0, 0.0, 0.0]);
        assert_eq!(r.dropped, 0);
        assert!(r.warnings.is_empty());
    }

    #[test]
    fn lowrank_eig_orthogonal_rank_one_is_empty() {
        let r = lowrank_eig(&orthogonal_rank_one(), true, &ToleranceConfig::default()).unwrap();
        assert!(r.lambdas.is_empty());
        assert_eq!(r.dropped, 1);
        assert!(r.warnings.contains(&EigWarning::RankDeficient { rank: 0, inner: 1 }));
    }

    #[test]
    fn lowrank_eig_random_integer_matches_dense() {
        let cfg = ToleranceConfig::default();
        let mut rng = seeded(8);
        let f = FactorPair::new(integer(8, 3, -4, 4, &mut rng), integer(3, 8, -4, 4, &mut rng)).unwrap();
        let r = lowrank_eig(&f, true, &cfg).unwrap();
        let reference = dense_nonzero_eigenvalues(&f.to_dense(), &cfg).unwrap();
        assert!(match_spectra(&r.lambdas, &reference).within(1e-9));
        assert!(r.accepted(&cfg));
    }

    #[test]
    fn wide_factors_fall_back_to_direct_solve() {
        let cfg = ToleranceConfig::default();
        let mut rng = seeded(77);
        let f = FactorPair::new(gaussian(3, 5, true, &mut rng), gaussian(5, 3, true, &mut rng)).unwrap();
        let r = lowrank_eig(&f, true, &cfg).unwrap();
        assert_eq!(r.lambdas.len(), 3);
        assert_eq!(r.dropped, 2);
        assert!(r.accepted(&cfg));
        // V = B W are eigenvectors of B A.
        let ba = small_product(&f);
        assert!(eigen_residual(&ba, &r.lambdas, r.v.as_ref().unwrap()) < 1e-12);
        let reference = eig_dense(&ba, false).unwrap();
        let nz = nonzero_filter(&reference.eigenvalues, ba.norm_fro(), &cfg);
        let nz: Vec<_> = nz.into_iter().map(|i| reference.eigenvalues[i]).collect();
        assert!(match_spectra(&r.lambdas, &nz).within(1e-10));
    }

    #[test]
    fn rank_zero_pair_has_empty_spectrum() {
        let f = FactorPair::new(DenseMatrix::zeros(4, 0), DenseMatrix::zeros(0, 4)).unwrap();
        let r = lowrank_eig(&f, true, &ToleranceConfig::default()).unwrap();
        assert!(r.lambdas.is_empty());
        assert_eq!(r.dropped, 0);
    }

    #[test]
    fn normalize_vectors_gives_unit_columns() {
        let mut rng = seeded(5);
        let f = FactorPair::new(gaussian(9, 3, true, &mut rng), gaussian(3, 9, true, &mut rng)).unwrap();
        let mut r = lowrank_eig(&f, true, &ToleranceConfig::default()).unwrap();
        r.normalize_vectors();
        let w = r.w.unwrap();
        for j in 0..w.ncols() {
            assert!((norm2(w.column(j)) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn residual_examples() {
        let d = FactorPair::new(
            DenseMatrix::from_real_rows(&[[2.0, 0.0], [0.0, 3.0], [0.0, 0.0]]),
            DenseMatrix::from_real_rows(&[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]),
        )
        .unwrap();
        assert!(residual(&d, c(3.0), &[c(0.0), c(1.0), c(0.0)]).unwrap() <= 1e-15);
        assert_eq!(residual(&e1_pair(3), c(1.0), &[c(1.0), c(0.0), c(0.0)]).unwrap(), 0.0);
        assert_eq!(residual(&e1_pair(3), c(1.0), &[c(0.0); 3]), Err(LinalgError::ZeroVector));
    }

    #[test]
    fn residual_grows_linearly_with_perturbation() {
        let mut rng = seeded(19);
        let f = FactorPair::new(gaussian(7, 2, false, &mut rng), gaussian(2, 7, false, &mut rng)).unwrap();
        let r = lowrank_eig(&f, true, &ToleranceConfig::default()).unwrap();
        let w = r.w.as_ref().unwrap().column(0).to_vec();
        let lambda = r.lambdas[0];
        let dir = gaussian(7, 1, false, &mut rng);
        let deltas = [1e-6, 1e-4, 1e-2];
        let res: Vec<f64> = deltas
            .iter()
            .map(|&d| {
                let p: Vec<Complex64> = w.iter().zip(dir.column(0)).map(|(a, b)| a + b * d).collect();
                residual(&f, lambda, &p).unwrap()
            })
            .collect();
        // Least-squares slope of log(residual) against log(delta).
        let xs: Vec<f64> = deltas.iter().map(|d| d.ln()).collect();
        let ys: Vec<f64> = res.iter().map(|r| r.ln()).collect();
        let (mx, my) = (xs.iter().sum::<f64>() / 3.0, ys.iter().sum::<f64>() / 3.0);
        let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
            / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
        assert!((slope - 1.0).abs() < 0.05, "slope {slope}");
    }

    #[test]
    fn lift_jordan_chain_example() {
        let cfg = ToleranceConfig::default();
        let f = chain_pair();
        let chain = JordanChain::new(c(2.0), DenseMatrix::identity(2));
        let lifted = lift_jordan_chain(&f, &chain, &cfg).unwrap();
        assert_eq!(lifted.vectors, f.a().clone());
        // Recurrence against the explicit 4x4 product: AB v2 = 2 v2 + v1.
        let x = f.to_dense();
        let v1 = lifted.vectors.column(0);
        let v2 = lifted.vectors.column(1);
        let lhs = x.mul_vec(v2);
        for i in 0..4 {
            assert_eq!(lhs[i], v2[i] * 2.0 + v1[i]);
        }
        assert_eq!(lifted.residual_against(&x).unwrap(), 0.0);
    }

    #[test]
    fn length_one_chain_is_lift() {
        let cfg = ToleranceConfig::default();
        let f = e1_pair(3);
        let lifted = lift_jordan_chain(&f, &JordanChain::new(c(1.0), DenseMatrix::identity(1)), &cfg).unwrap();
        assert_eq!(lifted.vectors, f.a().clone());
    }

    #[test]
    fn lift_jordan_chain_rejects_zero_and_invalid() {
        let cfg = ToleranceConfig::default();
        let f = orthogonal_rank_one();
        let chain = JordanChain::new(c(0.0), DenseMatrix::identity(1));
        assert!(matches!(lift_jordan_chain(&f, &chain, &cfg), Err(LinalgError::ZeroEigenvalue(_))));
        let bad = JordanChain::new(c(3.0), DenseMatrix::identity(2));
        assert!(matches!(
            lift_jordan_chain(&chain_pair(), &bad, &cfg),
            Err(LinalgError::InvalidChain { .. })
        ));
    }

    #[test]
    fn flop_model_examples() {
        assert_eq!(flop_model(2000, 20, false, false).unwrap(), 1_672_000);
        assert_eq!(flop_model(1, 1, true, false).unwrap(), 3);
        assert_eq!(flop_model(1000, 10, true, true).unwrap(), 209_000);
        assert_eq!(flop_model(1000, 10, false, true).unwrap(), 2 * 1000 * 100 + 25 * 1000);
        assert_eq!(dense_flop_model(2000, false, false), 72_000_000_000);
        assert!(flop_model(3, 4, false, false).is_err());
        assert!(flop_model(0, 0, false, false).is_err());
    }

    #[test]
    fn match_spectra_pairs_nearest() {
        let a = [c(1.0), Complex64::new(0.0, 1.0), Complex64::new(0.0, -1.0)];
        let b = [Complex64::new(0.0, -1.0 + 1e-12), c(1.0), Complex64::new(1e-12, 1.0)];
        let m = match_spectra(&a, &b);
        assert!(m.within(1e-11));
        assert!(!m.within(1e-13));
        assert!(!match_spectra(&a, &b[..2]).within(1.0));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn spectral_identity_holds(seed in any::<u64>(), n in 2usize..24, r in 1usize..6, complex in any::<bool>()) {
            let r = r.min(n);
            let mut rng = seeded(seed);
            let f = FactorPair::new(gaussian(n, r, complex, &mut rng), gaussian(r, n, complex, &mut rng)).unwrap();
            let cfg = ToleranceConfig::default();
            let got = lowrank_eig(&f, true, &cfg).unwrap();
            let reference = dense_nonzero_eigenvalues(&f.to_dense(), &cfg).unwrap();
            prop_assert!(match_spectra(&got.lambdas, &reference).within(1e-9));
            prop_assert!(got.accepted(&cfg));
            // Swapping roles through the transposed factorization.
            let swapped = lowrank_eig(&f.transposed(), false, &cfg).unwrap();
            prop_assert!(match_spectra(&swapped.lambdas, &got.lambdas).within(1e-9));
        }
    }
}
