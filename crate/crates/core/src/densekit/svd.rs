use num_complex::Complex64;

use super::matrix::{dotc, norm2, DenseMatrix, ZERO};
use super::tolerance::{ToleranceConfig, EPS};
use crate::error::{LinalgError, Result};

const MAX_SWEEPS: usize = 80;

/// Thin singular value decomposition `M = U diag(sigma) Vh`.
///
/// With `k = min(m, n)`, `U` is `m x k`, `sigma` has length `k` and is
/// nonincreasing, and `Vh` is `k x n`.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: DenseMatrix,
    pub sigma: Vec<f64>,
    pub vh: DenseMatrix,
}

impl Svd {
    /// `U diag(sigma) Vh`.
    pub fn reconstruct(&self) -> DenseMatrix {
        let us = self
            .u
            .scale_columns(&self.sigma.iter().map(|&s| Complex64::new(s, 0.0)).collect::<Vec<_>>());
        super::ops::matmul(&us, &self.vh).expect("consistent svd shapes")
    }
}

/// One-sided (Hestenes) Jacobi SVD.
pub fn svd(m: &DenseMatrix) -> Result<Svd> {
    let (rows, cols) = m.shape();
    if rows < cols {
        let t = svd(&m.adjoint())?;
        return Ok(Svd {
            u: t.vh.adjoint(),
            sigma: t.sigma,
            vh: t.u.adjoint(),
        });
    }
    if cols == 0 {
        return Ok(Svd {
            u: DenseMatrix::zeros(rows, 0),
            sigma: Vec::new(),
            vh: DenseMatrix::zeros(0, 0),
        });
    }

    let mut g = m.clone();
    // Columns at roundoff level relative to the whole matrix cannot be
    // orthogonalized further.
    let negligible = (EPS * m.norm_fro()).powi(2);
    let mut v = DenseMatrix::identity(cols);
    let mut converged = false;
    let mut worst = 0.0;
    for _ in 0..MAX_SWEEPS {
        worst = 0.0f64;
        let mut rotated = false;
        for p in 0..cols - 1 {
            for q in p + 1..cols {
                let alpha = norm2(g.column(p)).powi(2);
                let beta = norm2(g.column(q)).powi(2);
                let gamma = dotc(g.column(p), g.column(q));
                let gabs = gamma.norm();
                if gabs == 0.0 || alpha.min(beta) <= negligible {
                    continue;
                }
                let rel = gabs / (alpha.sqrt() * beta.sqrt());
                worst = worst.max(rel);
                if rel <= EPS {
                    continue;
                }
                rotated = true;
                let (c, s, u) = jacobi_rotation(alpha, beta, gamma);
                rotate_columns(&mut g, p, q, c, s, u);
                rotate_columns(&mut v, p, q, c, s, u);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(LinalgError::NoConvergence {
            op: "svd",
            iterations: MAX_SWEEPS,
            residual: worst,
        });
    }

    let mut sigma: Vec<f64> = (0..cols).map(|j| norm2(g.column(j))).collect();
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&a, &b| sigma[b].total_cmp(&sigma[a]));
    sigma = order.iter().map(|&j| sigma[j]).collect();
    let g = g.select_columns(&order);
    let v = v.select_columns(&order);

    // Columns whose singular value is at roundoff level carry no reliable
    // direction; they are replaced by an orthonormal completion.
    let floor = sigma[0] * EPS * rows as f64;
    let mut u = DenseMatrix::zeros(rows, cols);
    let mut good = Vec::with_capacity(cols);
    for j in 0..cols {
        if sigma[j] > floor && sigma[j] > 0.0 {
            let inv = 1.0 / sigma[j];
            for (dst, src) in u.column_mut(j).iter_mut().zip(g.column(j)) {
                *dst = src * inv;
            }
            good.push(j);
        }
    }
    for j in 0..cols {
        if !good.contains(&j) {
            let w = complete_basis(&u, &good, rows);
            u.column_mut(j).copy_from_slice(&w);
            good.push(j);
        }
    }
    Ok(Svd {
        u,
        sigma,
        vh: v.adjoint(),
    })
}

/// Singular values only.
pub fn singular_values(m: &DenseMatrix) -> Result<Vec<f64>> {
    Ok(svd(m)?.sigma)
}

/// Number of singular values above `cutoff * sigma_1`; zero for the zero matrix.
pub fn numeric_rank(m: &DenseMatrix, cfg: &ToleranceConfig) -> Result<usize> {
    let sigma = singular_values(m)?;
    Ok(rank_from_sigma(&sigma, cfg.rank_cutoff(m.nrows(), m.ncols())))
}

pub(crate) fn rank_from_sigma(sigma: &[f64], rtol: f64) -> usize {
    match sigma.first() {
        Some(&s1) if s1 > 0.0 => sigma.iter().filter(|&&s| s > rtol * s1).count(),
        _ => 0,
    }
}

/// Rotation `J = [[c, s], [-s conj(u), c conj(u)]]` diagonalizing the
/// Hermitian 2x2 Gram matrix `[[alpha, gamma], [conj(gamma), beta]]`.
pub(crate) fn jacobi_rotation(alpha: f64, beta: f64, gamma: Complex64) -> (f64, f64, Complex64) {
    let gabs = gamma.norm();
    let u = gamma / gabs;
    let zeta = (beta - alpha) / (2.0 * gabs);
    let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
    let t = if zeta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (1.0 + t * t).sqrt();
    (c, t * c, u)
}

/// `M[:, p], M[:, q] <- M[:, p] c - M[:, q] s conj(u), M[:, p] s + M[:, q] c conj(u)`.
pub(crate) fn rotate_columns(m: &mut DenseMatrix, p: usize, q: usize, c: f64, s: f64, u: Complex64) {
    let uc = u.conj();
    let (cp, cq) = m.two_columns_mut(p, q);
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let a = *x;
        let b = *y;
        *x = a * c - b * s * uc;
        *y = a * s + b * c * uc;
    }
}

/// Unit vector orthogonal to the listed columns of `u`.
fn complete_basis(u: &DenseMatrix, used: &[usize], n: usize) -> Vec<Complex64> {
    let mut best: Option<(f64, Vec<Complex64>)> = None;
    for e in 0..n {
        let mut w = vec![ZERO; n];
        w[e] = Complex64::new(1.0, 0.0);
        for _ in 0..2 {
            for &j in used {
                let c = dotc(u.column(j), &w);
                for (wi, ui) in w.iter_mut().zip(u.column(j)) {
                    *wi -= c * ui;
                }
            }
        }
        let nrm = norm2(&w);
        if best.as_ref().is_none_or(|(b, _)| nrm > *b) {
            best = Some((nrm, w));
        }
        if nrm > 0.5 {
            break;
        }
    }
    let (nrm, mut w) = best.expect("n > 0");
    w.iter_mut().for_each(|z| *z /= nrm);
    w
}
