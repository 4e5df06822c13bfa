use num_complex::Complex64;

use super::flops;
use super::matrix::{axpy, dotc, DenseMatrix, ZERO};
use crate::error::{LinalgError, Result};

/// Model flop count of an `m x k` by `k x n` product.
pub fn matmul_flops(m: usize, k: usize, n: usize) -> u64 {
    2 * m as u64 * k as u64 * n as u64
}

/// `A B`. Records `2 m k n` flops.
pub fn matmul(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    if a.ncols() != b.nrows() {
        return Err(mismatch("matmul", a, b));
    }
    let (m, n) = (a.nrows(), b.ncols());
    let mut c = DenseMatrix::zeros(m, n);
    for j in 0..n {
        let bj = b.column(j);
        let cj = c.column_mut(j);
        for (p, &bpj) in bj.iter().enumerate() {
            if bpj != ZERO {
                axpy(bpj, a.column(p), cj);
            }
        }
    }
    flops::record(matmul_flops(m, a.ncols(), n));
    Ok(c)
}

/// `A^* B` without forming the adjoint. Records `2 m k n` flops.
pub fn adjoint_matmul(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    if a.nrows() != b.nrows() {
        return Err(mismatch("adjoint_matmul", a, b));
    }
    let (m, n) = (a.ncols(), b.ncols());
    let mut c = DenseMatrix::zeros(m, n);
    for j in 0..n {
        for i in 0..m {
            c[(i, j)] = dotc(a.column(i), b.column(j));
        }
    }
    flops::record(matmul_flops(m, a.nrows(), n));
    Ok(c)
}

/// `A B^*` without forming the adjoint.
pub fn matmul_adjoint(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    if a.ncols() != b.ncols() {
        return Err(mismatch("matmul_adjoint", a, b));
    }
    let (m, n) = (a.nrows(), b.nrows());
    let mut c = DenseMatrix::zeros(m, n);
    for p in 0..a.ncols() {
        let ap = a.column(p);
        let bp = b.column(p);
        for j in 0..n {
            let s = bp[j].conj();
            if s != ZERO {
                axpy(s, ap, c.column_mut(j));
            }
        }
    }
    flops::record(matmul_flops(m, a.ncols(), n));
    Ok(c)
}

/// Integer power by repeated multiplication.
pub fn matpow(m: &DenseMatrix, k: usize) -> Result<DenseMatrix> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare {
            op: "matpow",
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    let mut out = DenseMatrix::identity(m.nrows());
    for _ in 0..k {
        out = matmul(&out, m)?;
    }
    Ok(out)
}

/// Relative residual `max_j ||M v_j - lambda_j v_j|| / (||M||_F ||v_j||)`.
pub fn eigen_residual(m: &DenseMatrix, lambdas: &[Complex64], vectors: &DenseMatrix) -> f64 {
    let scale = m.norm_fro().max(f64::MIN_POSITIVE);
    lambdas
        .iter()
        .enumerate()
        .map(|(j, &l)| {
            let v = vectors.column(j);
            let mut r = m.mul_vec(v);
            axpy(-l, v, &mut r);
            super::norm2(&r) / (scale * super::norm2(v).max(f64::MIN_POSITIVE))
        })
        .fold(0.0, f64::max)
}

fn mismatch(op: &'static str, a: &DenseMatrix, b: &DenseMatrix) -> LinalgError {
    LinalgError::DimensionMismatch {
        op,
        left_rows: a.nrows(),
        left_cols: a.ncols(),
        right_rows: b.nrows(),
        right_cols: b.ncols(),
    }
}
