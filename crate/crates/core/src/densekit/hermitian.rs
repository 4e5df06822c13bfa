use num_complex::Complex64;

use super::matrix::DenseMatrix;
use super::svd::{jacobi_rotation, rotate_columns};
use super::tolerance::EPS;
use crate::error::{LinalgError, Result};

const MAX_SWEEPS: usize = 80;

/// Allowed relative asymmetry `max |M - M^*| / ||M||_F` before rejection.
pub const HERMITIAN_RTOL: f64 = 1e-13;

/// Eigendecomposition `M = Q diag(lambda) Q^*` of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct SymmetricEig {
    /// Nondecreasing.
    pub eigenvalues: Vec<f64>,
    pub q: DenseMatrix,
}

impl SymmetricEig {
    pub fn reconstruct(&self) -> DenseMatrix {
        let d: Vec<Complex64> = self.eigenvalues.iter().map(|&l| Complex64::new(l, 0.0)).collect();
        super::ops::matmul_adjoint(&self.q.scale_columns(&d), &self.q).expect("square factors")
    }
}

/// Checks squareness and Hermitian symmetry, returning `(M + M^*) / 2`.
pub(crate) fn symmetrize(m: &DenseMatrix, op: &'static str) -> Result<DenseMatrix> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare {
            op,
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    let tolerance = HERMITIAN_RTOL * m.norm_fro();
    let asymmetry = m.hermitian_defect();
    if asymmetry > tolerance {
        return Err(LinalgError::NotHermitian {
            asymmetry,
            tolerance,
        });
    }
    let n = m.nrows();
    Ok(DenseMatrix::from_fn(n, n, |i, j| {
        if i == j {
            Complex64::new(m[(i, i)].re, 0.0)
        } else {
            (m[(i, j)] + m[(j, i)].conj()) * 0.5
        }
    }))
}

/// Cyclic two-sided Jacobi eigensolver for Hermitian matrices.
///
/// Real input stays real throughout: every rotation phase is then `+-1`.
pub fn symmetric_eig(m: &DenseMatrix) -> Result<SymmetricEig> {
    let mut h = symmetrize(m, "symmetric_eig")?;
    let n = h.nrows();
    let mut q = DenseMatrix::identity(n);
    let floor = h.norm_fro() * EPS * EPS;

    let mut converged = n < 2;
    let mut worst = 0.0;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        worst = 0.0f64;
        for p in 0..n.saturating_sub(1) {
            for r in p + 1..n {
                let g = h[(p, r)];
                let gabs = g.norm();
                let a = h[(p, p)].re;
                let b = h[(r, r)].re;
                worst = worst.max(gabs);
                if gabs <= floor || gabs <= EPS * a.abs().sqrt() * b.abs().sqrt() {
                    continue;
                }
                rotated = true;
                let (c, s, u) = jacobi_rotation(a, b, g);
                rotate_columns(&mut h, p, r, c, s, u);
                rotate_rows_adjoint(&mut h, p, r, c, s, u);
                rotate_columns(&mut q, p, r, c, s, u);
                h[(p, r)] = Complex64::new(0.0, 0.0);
                h[(r, p)] = Complex64::new(0.0, 0.0);
                h[(p, p)].im = 0.0;
                h[(r, r)].im = 0.0;
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(LinalgError::NoConvergence {
            op: "symmetric_eig",
            iterations: MAX_SWEEPS,
            residual: worst,
        });
    }

    let values: Vec<f64> = (0..n).map(|i| h[(i, i)].re).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    Ok(SymmetricEig {
        eigenvalues: order.iter().map(|&i| values[i]).collect(),
        q: q.select_columns(&order),
    })
}

/// Rows `p, r` of `M` are replaced by those of `J^* M` for the rotation of
/// [`jacobi_rotation`].
fn rotate_rows_adjoint(m: &mut DenseMatrix, p: usize, r: usize, c: f64, s: f64, u: Complex64) {
    for j in 0..m.ncols() {
        let a = m[(p, j)];
        let b = m[(r, j)];
        m[(p, j)] = a * c - b * s * u;
        m[(r, j)] = a * s + b * c * u;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densekit::ops::adjoint_matmul;
    use crate::densekit::random::{gaussian, seeded, symmetric};

    fn orthonormality(q: &DenseMatrix) -> f64 {
        let g = adjoint_matmul(q, q).unwrap();
        g.sub(&DenseMatrix::identity(g.nrows())).unwrap().norm_max()
    }

    #[test]
    fn diagonal_gives_permutation() {
        let e = symmetric_eig(&DenseMatrix::from_real_diagonal(&[-3.0, 2.0])).unwrap();
        assert_eq!(e.eigenvalues, vec![-3.0, 2.0]);
        assert_eq!(e.q, DenseMatrix::identity(2));
        let e = symmetric_eig(&DenseMatrix::from_real_diagonal(&[2.0, -3.0])).unwrap();
        assert_eq!(e.eigenvalues, vec![-3.0, 2.0]);
        assert_eq!(e.q.to_real_row_major().unwrap(), vec![0.0, 1.0, 1.0, 0.0]);
    }

    #[test]
    fn two_by_two_closed_form() {
        // [[2,1],[1,2]]: trace 4, determinant 3 -> 1 and 3.
        let e = symmetric_eig(&DenseMatrix::from_real_rows(&[[2.0, 1.0], [1.0, 2.0]])).unwrap();
        assert!((e.eigenvalues[0] - 1.0).abs() < 1e-15);
        assert!((e.eigenvalues[1] - 3.0).abs() < 1e-15);
    }

    #[test]
    fn random_reconstruction_real_and_complex() {
        let mut rng = seeded(23);
        let real = symmetric(6, &mut rng);
        let g = gaussian(6, 6, true, &mut rng);
        let herm = DenseMatrix::from_fn(6, 6, |i, j| (g[(i, j)] + g[(j, i)].conj()) * 0.5);
        for m in [real, herm] {
            let e = symmetric_eig(&m).unwrap();
            assert!(e.reconstruct().sub(&m).unwrap().norm_fro() <= 1e-12 * m.norm_fro());
            assert!(orthonormality(&e.q) <= 1e-13);
            assert!(e.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn real_input_stays_real() {
        let mut rng = seeded(4);
        let e = symmetric_eig(&symmetric(7, &mut rng)).unwrap();
        assert!(e.q.is_real());
    }

    #[test]
    fn rejects_asymmetric_and_rectangular() {
        let m = DenseMatrix::from_real_rows(&[[1.0, 2.0], [0.0, 1.0]]);
        assert!(matches!(symmetric_eig(&m), Err(LinalgError::NotHermitian { .. })));
        assert!(matches!(
            symmetric_eig(&DenseMatrix::zeros(2, 3)),
            Err(LinalgError::NotSquare { .. })
        ));
    }
}
