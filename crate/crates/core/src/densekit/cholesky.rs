use num_complex::Complex64;

use super::matrix::{DenseMatrix, ZERO};
use crate::error::{LinalgError, Result};

/// Lower-triangular `L` with positive real diagonal and `L L^* = M`.
///
/// Only the lower triangle of `M` is read. A nonpositive pivot is reported
/// with its 1-based index.
pub fn cholesky(m: &DenseMatrix) -> Result<DenseMatrix> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare {
            op: "cholesky",
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    let n = m.nrows();
    let mut l = DenseMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = m[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if d.is_nan() || d <= 0.0 || d.is_infinite() {
            return Err(LinalgError::NotPositiveDefinite { pivot: j + 1, value: d });
        }
        let d = d.sqrt();
        l[(j, j)] = Complex64::new(d, 0.0);
        for i in j + 1..n {
            let mut s = m[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / d;
        }
    }
    Ok(l)
}

/// Solves `L X = B` for lower-triangular `L`.
pub fn solve_lower(l: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    check_triangular_shapes("solve_lower", l, b)?;
    let n = l.nrows();
    let mut x = b.clone();
    for j in 0..x.ncols() {
        for i in 0..n {
            let mut s = x[(i, j)];
            for k in 0..i {
                s -= l[(i, k)] * x[(k, j)];
            }
            if l[(i, i)] == ZERO {
                return Err(LinalgError::Singular { pivot: i + 1 });
            }
            x[(i, j)] = s / l[(i, i)];
        }
    }
    Ok(x)
}

/// Solves `L^* X = B` for lower-triangular `L`.
pub fn solve_lower_adjoint(l: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    check_triangular_shapes("solve_lower_adjoint", l, b)?;
    let n = l.nrows();
    let mut x = b.clone();
    for j in 0..x.ncols() {
        for i in (0..n).rev() {
            let mut s = x[(i, j)];
            for k in i + 1..n {
                s -= l[(k, i)].conj() * x[(k, j)];
            }
            if l[(i, i)] == ZERO {
                return Err(LinalgError::Singular { pivot: i + 1 });
            }
            x[(i, j)] = s / l[(i, i)].conj();
        }
    }
    Ok(x)
}

fn check_triangular_shapes(op: &'static str, l: &DenseMatrix, b: &DenseMatrix) -> Result<()> {
    if !l.is_square() {
        return Err(LinalgError::NotSquare {
            op,
            rows: l.nrows(),
            cols: l.ncols(),
        });
    }
    if l.nrows() != b.nrows() {
        return Err(LinalgError::DimensionMismatch {
            op,
            left_rows: l.nrows(),
            left_cols: l.ncols(),
            right_rows: b.nrows(),
            right_cols: b.ncols(),
        });
    }
    Ok(())
}
