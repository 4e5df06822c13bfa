//! Eigendecomposition of a symmetric low-rank matrix `X = Ã S̃ Ã^*` that
//! keeps eigenvalues real and eigenvectors orthonormal.
//!
//! The middle factor is first brought to a sign matrix by congruence,
//! `Wc S̃ Wc^* = S`, so that `X = A S A^*` with `A = Ã Wc^{-1}`. The nonzero
//! eigenpairs then come from the pencil `(A^* A, S)`, whose first member is
//! positive definite whenever `A` has full column rank: with
//! `V^* (A^* A) V = I` and `V^* S V = Λ^{-1}`, the columns of `W = A V` are
//! orthonormal and `A S A^* W = W Λ`.
//!
//! For Hermitian data `^*` is the conjugate transpose; for real data it is
//! the plain transpose and every intermediate stays real.

use num_complex::Complex64;

use crate::densekit::{
    adjoint_matmul, cholesky, matmul, matmul_adjoint, norm2, numeric_rank, qr_thin, singular_values, solve,
    solve_lower, solve_lower_adjoint, symmetric_eig, DenseMatrix, ToleranceConfig, EPS,
};
use crate::error::{LinalgError, Result};
use crate::lowrank::FactorPair;

/// `X = Ã S̃ Ã^*` with Hermitian, nonsingular `S̃`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricFactorization {
    atilde: DenseMatrix,
    stilde: DenseMatrix,
}

impl SymmetricFactorization {
    /// Checks shapes, Hermitian symmetry of `S̃` and its numeric rank.
    pub fn new(atilde: DenseMatrix, stilde: DenseMatrix, cfg: &ToleranceConfig) -> Result<Self> {
        if !stilde.is_square() || stilde.nrows() != atilde.ncols() {
            return Err(LinalgError::DimensionMismatch {
                op: "SymmetricFactorization::new",
                left_rows: atilde.nrows(),
                left_cols: atilde.ncols(),
                right_rows: stilde.nrows(),
                right_cols: stilde.ncols(),
            });
        }
        let stilde = hermitian_checked(&stilde)?;
        let r = stilde.nrows();
        let rank = numeric_rank(&stilde, cfg)?;
        if rank < r {
            return Err(LinalgError::SingularMiddleFactor { rank, expected: r });
        }
        Ok(Self { atilde, stilde })
    }

    pub fn atilde(&self) -> &DenseMatrix {
        &self.atilde
    }

    pub fn stilde(&self) -> &DenseMatrix {
        &self.stilde
    }

    pub fn n(&self) -> usize {
        self.atilde.nrows()
    }

    pub fn rank(&self) -> usize {
        self.atilde.ncols()
    }

    /// The same matrix as a general factor pair `(Ã S̃, Ã^*)`.
    pub fn to_factor_pair(&self) -> FactorPair {
        let left = matmul(&self.atilde, &self.stilde).expect("validated shapes");
        FactorPair::new(left, self.atilde.adjoint()).expect("validated shapes")
    }

    /// The explicit `N x N` matrix. Desk-scale oracles only.
    pub fn to_dense(&self) -> DenseMatrix {
        self.to_factor_pair().to_dense()
    }
}

/// Diagonal matrix with entries `+1` or `-1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignDiagonal {
    signs: Vec<i8>,
}

impl SignDiagonal {
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        if let Some(bad) = signs.iter().find(|&&s| s != 1 && s != -1) {
            return Err(LinalgError::InvalidArgument(format!("sign entry {bad} is not +1 or -1")));
        }
        Ok(Self { signs })
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }

    /// `(positive, negative)` counts.
    pub fn inertia(&self) -> (usize, usize) {
        let p = self.signs.iter().filter(|&&s| s > 0).count();
        (p, self.signs.len() - p)
    }

    pub fn to_matrix(&self) -> DenseMatrix {
        DenseMatrix::from_real_diagonal(&self.as_f64())
    }

    fn as_f64(&self) -> Vec<f64> {
        self.signs.iter().map(|&s| f64::from(s)).collect()
    }
}

/// `X = A S A^*` with a sign matrix in the middle.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedSymmetric {
    pub a: DenseMatrix,
    pub s: SignDiagonal,
}

impl ReducedSymmetric {
    pub fn new(a: DenseMatrix, s: SignDiagonal) -> Result<Self> {
        if a.ncols() != s.len() {
            return Err(LinalgError::DimensionMismatch {
                op: "ReducedSymmetric::new",
                left_rows: a.nrows(),
                left_cols: a.ncols(),
                right_rows: s.len(),
                right_cols: s.len(),
            });
        }
        Ok(Self { a, s })
    }

    /// `(A S, A^*)` for the general nonsymmetric path.
    pub fn to_factor_pair(&self) -> FactorPair {
        let signs: Vec<Complex64> = self.s.as_f64().into_iter().map(|s| Complex64::new(s, 0.0)).collect();
        FactorPair::new(self.a.scale_columns(&signs), self.a.adjoint()).expect("validated shapes")
    }

    /// `A S A^* x` in `O(N r)` work.
    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = self.a.adjoint_mul_vec(x);
        for (yi, &s) in y.iter_mut().zip(&self.s.signs) {
            *yi *= f64::from(s);
        }
        self.a.mul_vec(&y)
    }
}

/// `(M + M^*) / 2` after checking that `M` is square and Hermitian.
fn hermitian_checked(m: &DenseMatrix) -> Result<DenseMatrix> {
    crate::densekit::hermitian::symmetrize(m, "symmetric factorization")
}

/// `(M + M^*) / 2` without a symmetry check, for products that are Hermitian
/// in exact arithmetic.
fn hermitian_part(m: &DenseMatrix) -> DenseMatrix {
    let n = m.nrows();
    DenseMatrix::from_fn(n, n, |i, j| {
        if i == j {
            Complex64::new(m[(i, i)].re, 0.0)
        } else {
            (m[(i, j)] + m[(j, i)].conj()) * 0.5
        }
    })
}

/// Congruence `Wc` with `Wc S̃ Wc^* = diag(signs)`, `+1` entries first.
///
/// Built from `S̃ = Q D Q^*` as `Wc = |D|^{-1/2} Q^*`. Within each sign the
/// slots are ordered by decreasing `|d|`.
pub fn reduce_to_sign(stilde: &DenseMatrix, cfg: &ToleranceConfig) -> Result<(DenseMatrix, SignDiagonal)> {
    let eig = symmetric_eig(stilde)?;
    let r = eig.eigenvalues.len();
    let dmax = eig.eigenvalues.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    let cutoff = cfg.rank_cutoff(r, r) * dmax;
    let rank = eig.eigenvalues.iter().filter(|d| d.abs() > cutoff).count();
    if rank < r || (r > 0 && dmax == 0.0) {
        return Err(LinalgError::SingularMiddleFactor { rank, expected: r });
    }

    let mut order: Vec<usize> = (0..r).collect();
    order.sort_by(|&i, &j| {
        let (a, b) = (eig.eigenvalues[i], eig.eigenvalues[j]);
        (b > 0.0).cmp(&(a > 0.0)).then(b.abs().total_cmp(&a.abs()))
    });

    let mut wc = DenseMatrix::zeros(r, r);
    let mut signs = Vec::with_capacity(r);
    for (row, &k) in order.iter().enumerate() {
        let d = eig.eigenvalues[k];
        let scale = 1.0 / d.abs().sqrt();
        for (col, q) in eig.q.column(k).iter().enumerate() {
            wc[(row, col)] = q.conj() * scale;
        }
        signs.push(if d > 0.0 { 1 } else { -1 });
    }
    Ok((wc, SignDiagonal { signs }))
}

/// `A = Ã Wc^{-1}`, computed from `Wc^* A^* = Ã^*` by an LU solve.
pub fn apply_congruence(f: &SymmetricFactorization, wc: &DenseMatrix, s: &SignDiagonal) -> Result<ReducedSymmetric> {
    let r = f.rank();
    if wc.shape() != (r, r) || s.len() != r {
        return Err(LinalgError::DimensionMismatch {
            op: "apply_congruence",
            left_rows: f.n(),
            left_cols: r,
            right_rows: wc.nrows(),
            right_cols: wc.ncols(),
        });
    }
    let sigma = singular_values(wc)?;
    let condition = match (sigma.first(), sigma.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        (Some(_), Some(_)) => f64::INFINITY,
        _ => 1.0,
    };
    if condition * EPS * r.max(1) as f64 > 1e-2 {
        return Err(LinalgError::IllConditioned { condition });
    }
    let a_adj = solve(&wc.adjoint(), &f.atilde.adjoint()).map_err(|e| match e {
        LinalgError::Singular { .. } => LinalgError::IllConditioned { condition },
        other => other,
    })?;
    let reduced = ReducedSymmetric::new(a_adj.adjoint(), s.clone())?;
    debug_assert!(
        congruence_defect(f, &reduced)? <= 1e-11,
        "congruence does not reproduce the factored matrix"
    );
    Ok(reduced)
}

/// `||A S A^* - Ã S̃ Ã^*||_F / (||Ã||_F^2 ||S̃||_F)`, evaluated from the thin
/// QR of `[A, Ã]` without forming `N x N` data.
pub fn congruence_defect(f: &SymmetricFactorization, reduced: &ReducedSymmetric) -> Result<f64> {
    let (n, r) = (f.n(), f.rank());
    if reduced.a.shape() != (n, r) {
        return Err(LinalgError::DimensionMismatch {
            op: "congruence_defect",
            left_rows: n,
            left_cols: r,
            right_rows: reduced.a.nrows(),
            right_cols: reduced.a.ncols(),
        });
    }
    let mut cols: Vec<&[Complex64]> = (0..r).map(|j| reduced.a.column(j)).collect();
    cols.extend((0..r).map(|j| f.atilde.column(j)));
    let c = DenseMatrix::from_columns(n, &cols);
    // X1 - X2 = C D C^* with D = diag(S, -S̃); the norm only sees R from C = Q R.
    let mut d = DenseMatrix::zeros(2 * r, 2 * r);
    for (i, &s) in reduced.s.signs.iter().enumerate() {
        d[(i, i)] = Complex64::new(f64::from(s), 0.0);
    }
    for i in 0..r {
        for j in 0..r {
            d[(r + i, r + j)] = -f.stilde[(i, j)];
        }
    }
    let rf = qr_thin(&c).r;
    let core = matmul_adjoint(&matmul(&rf, &d)?, &rf)?;
    let scale = f.atilde.norm_fro().powi(2) * f.stilde.norm_fro();
    let num = core.norm_fro();
    Ok(if num == 0.0 { 0.0 } else { num / scale })
}

/// Pencil `(G, S)` with `G` Hermitian positive definite: returns `V` and
/// real `Λ` with `G V = S V Λ`, `V^* G V = I` and `V^* S V = Λ^{-1}`.
///
/// Uses `G = L L^*`, `M = L^{-1} S L^{-*} = Q diag(μ) Q^*`, `Λ = 1/μ`,
/// `V = L^{-*} Q`. `Λ` is ordered by decreasing `|λ|`, positive first on ties.
pub fn generalized_spd_eig(g: &DenseMatrix, s: &SignDiagonal) -> Result<(DenseMatrix, Vec<f64>)> {
    if !g.is_square() || g.nrows() != s.len() {
        return Err(LinalgError::DimensionMismatch {
            op: "generalized_spd_eig",
            left_rows: g.nrows(),
            left_cols: g.ncols(),
            right_rows: s.len(),
            right_cols: s.len(),
        });
    }
    let l = cholesky(&hermitian_checked(g)?)?;
    let ls = solve_lower(&l, &s.to_matrix())?;
    let m = hermitian_part(&solve_lower(&l, &ls.adjoint())?);
    let eig = symmetric_eig(&m)?;
    if let Some(k) = eig.eigenvalues.iter().position(|&mu| mu == 0.0) {
        return Err(LinalgError::SingularMiddleFactor {
            rank: k,
            expected: s.len(),
        });
    }
    let lambdas: Vec<f64> = eig.eigenvalues.iter().map(|mu| 1.0 / mu).collect();
    let mut order: Vec<usize> = (0..lambdas.len()).collect();
    order.sort_by(|&i, &j| {
        let (a, b) = (lambdas[i], lambdas[j]);
        b.abs().total_cmp(&a.abs()).then(b.total_cmp(&a))
    });
    let v = solve_lower_adjoint(&l, &eig.q.select_columns(&order))?;
    Ok((v, order.iter().map(|&i| lambdas[i]).collect()))
}

/// Nonzero eigendecomposition `A S A^* = W Λ W^*` of a reduced factorization.
#[derive(Debug, Clone)]
pub struct SymmetricEigenResult {
    /// Ordered by decreasing `|λ|`, positive first on ties.
    pub lambdas: Vec<f64>,
    /// Orthonormal eigenvectors `W = A V` (`N x r`).
    pub w: DenseMatrix,
    /// Pencil eigenvectors (`r x r`).
    pub v: DenseMatrix,
    /// `||A S A^* w - λ w|| / (||A||_F^2 ||w||)` per column.
    pub residuals: Vec<f64>,
    /// `max |W^* W - I|` entrywise.
    pub orthogonality_defect: f64,
}

impl SymmetricEigenResult {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }

    pub fn accepted(&self, cfg: &ToleranceConfig) -> bool {
        self.residuals.iter().all(|&r| r <= cfg.residual_rtol)
    }
}

/// Eigenpairs of `A S A^*` from the pencil `(A^* A, S)`; `A` must have full
/// column rank.
pub fn symmetric_lowrank_eig(reduced: &ReducedSymmetric, cfg: &ToleranceConfig) -> Result<SymmetricEigenResult> {
    let a = &reduced.a;
    let r = a.ncols();
    let rank = numeric_rank(a, cfg)?;
    if rank < r {
        return Err(LinalgError::RankDeficient { rank, expected: r });
    }
    let g = adjoint_matmul(a, a)?;
    let (v, lambdas) = generalized_spd_eig(&g, &reduced.s)?;
    let w = matmul(a, &v)?;

    let scale = a.norm_fro().powi(2);
    let residuals = lambdas
        .iter()
        .enumerate()
        .map(|(j, &l)| {
            let col = w.column(j);
            let mut res = reduced.apply(col);
            for (x, y) in res.iter_mut().zip(col) {
                *x -= y * l;
            }
            let num = norm2(&res);
            if num == 0.0 {
                0.0
            } else {
                num / (scale * norm2(col))
            }
        })
        .collect();

    Ok(SymmetricEigenResult {
        orthogonality_defect: orthogonality_defect(&w)?,
        lambdas,
        w,
        v,
        residuals,
    })
}

/// `max |W^* W - I|` entrywise.
pub fn orthogonality_defect(w: &DenseMatrix) -> Result<f64> {
    let gram = adjoint_matmul(w, w)?;
    Ok(gram.sub(&DenseMatrix::identity(w.ncols()))?.norm_max())
}

/// Full pipeline from `Ã, S̃`: sign reduction, congruence, pencil solve.
pub fn symmetric_factored_eig(f: &SymmetricFactorization, cfg: &ToleranceConfig) -> Result<SymmetricEigenResult> {
    let (wc, s) = reduce_to_sign(f.stilde(), cfg)?;
    let reduced = apply_congruence(f, &wc, &s)?;
    symmetric_lowrank_eig(&reduced, cfg)
}
