use num_complex::Complex64;

use super::matrix::{dotc, norm2, DenseMatrix, ONE, ZERO};
use crate::error::{LinalgError, Result};

/// Householder reflector `I - tau v v^*` with real `tau`.
#[derive(Debug, Clone)]
pub(crate) struct Reflector {
    pub v: Vec<Complex64>,
    pub tau: f64,
}

impl Reflector {
    /// Reflector mapping `x` onto a multiple of the first unit vector.
    /// Returns the reflector and the resulting leading entry.
    pub fn annihilate(x: &[Complex64]) -> (Self, Complex64) {
        let nrm = norm2(x);
        if nrm == 0.0 || x.len() == 1 && x[0].im == 0.0 {
            return (Self { v: vec![ZERO; x.len()], tau: 0.0 }, x.first().copied().unwrap_or(ZERO));
        }
        let phase = if x[0] == ZERO { ONE } else { x[0] / x[0].norm() };
        let alpha = -phase * nrm;
        let mut v = x.to_vec();
        v[0] -= alpha;
        let vv: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vv == 0.0 {
            return (Self { v: vec![ZERO; x.len()], tau: 0.0 }, x[0]);
        }
        (Self { v, tau: 2.0 / vv }, alpha)
    }

    /// Applies `H` from the left to rows `offset..offset+len` of columns `cols`.
    pub fn apply_left(&self, m: &mut DenseMatrix, offset: usize, cols: std::ops::Range<usize>) {
        if self.tau == 0.0 {
            return;
        }
        let len = self.v.len();
        for j in cols {
            let col = &mut m.column_mut(j)[offset..offset + len];
            let s = dotc(&self.v, col) * self.tau;
            for (c, vi) in col.iter_mut().zip(&self.v) {
                *c -= vi * s;
            }
        }
    }

    /// Applies `H` from the right to columns `offset..offset+len` of rows `rows`.
    pub fn apply_right(&self, m: &mut DenseMatrix, offset: usize, rows: std::ops::Range<usize>) {
        if self.tau == 0.0 {
            return;
        }
        let n = m.nrows();
        let mut w = vec![ZERO; rows.len()];
        for (k, vk) in self.v.iter().enumerate() {
            let col = &m.as_slice()[(offset + k) * n..(offset + k + 1) * n];
            for (wi, i) in w.iter_mut().zip(rows.clone()) {
                *wi += col[i] * vk;
            }
        }
        for (k, vk) in self.v.iter().enumerate() {
            let s = vk.conj() * self.tau;
            let col = m.column_mut(offset + k);
            for (wi, i) in w.iter().zip(rows.clone()) {
                col[i] -= wi * s;
            }
        }
    }
}

/// Thin QR factorization `M = Q R` with `Q` of size `m x k`, `k = min(m, n)`.
#[derive(Debug, Clone)]
pub struct ThinQr {
    pub q: DenseMatrix,
    pub r: DenseMatrix,
}

/// Householder QR.
pub fn qr_thin(m: &DenseMatrix) -> ThinQr {
    let (rows, cols) = m.shape();
    let k = rows.min(cols);
    let mut r = m.clone();
    let mut reflectors = Vec::with_capacity(k);
    for j in 0..k {
        let (h, alpha) = Reflector::annihilate(&r.column(j)[j..]);
        h.apply_left(&mut r, j, j + 1..cols);
        let col = r.column_mut(j);
        col[j] = alpha;
        col[j + 1..].iter_mut().for_each(|z| *z = ZERO);
        reflectors.push(h);
    }
    let mut q = DenseMatrix::zeros(rows, k);
    for i in 0..k {
        q[(i, i)] = ONE;
    }
    for (j, h) in reflectors.iter().enumerate().rev() {
        h.apply_left(&mut q, j, j..k);
    }
    ThinQr {
        q,
        r: r.submatrix(0..k, 0..cols),
    }
}

/// Solves `A X = B` by LU with partial pivoting.
pub fn solve(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare {
            op: "solve",
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    if a.nrows() != b.nrows() {
        return Err(LinalgError::DimensionMismatch {
            op: "solve",
            left_rows: a.nrows(),
            left_cols: a.ncols(),
            right_rows: b.nrows(),
            right_cols: b.ncols(),
        });
    }
    let n = a.nrows();
    let mut lu = a.clone();
    let mut x = b.clone();
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| lu[(i, k)].norm().total_cmp(&lu[(j, k)].norm()))
            .unwrap();
        if lu[(p, k)] == ZERO {
            return Err(LinalgError::Singular { pivot: k + 1 });
        }
        if p != k {
            for j in 0..n {
                let t = lu[(k, j)];
                lu[(k, j)] = lu[(p, j)];
                lu[(p, j)] = t;
            }
            for j in 0..x.ncols() {
                let t = x[(k, j)];
                x[(k, j)] = x[(p, j)];
                x[(p, j)] = t;
            }
        }
        let pivot = lu[(k, k)];
        for i in k + 1..n {
            let l = lu[(i, k)] / pivot;
            lu[(i, k)] = l;
            if l == ZERO {
                continue;
            }
            for j in k + 1..n {
                let u = lu[(k, j)];
                lu[(i, j)] -= l * u;
            }
            for j in 0..x.ncols() {
                let u = x[(k, j)];
                x[(i, j)] -= l * u;
            }
        }
    }
    for j in 0..x.ncols() {
        for i in (0..n).rev() {
            let mut s = x[(i, j)];
            for p in i + 1..n {
                s -= lu[(i, p)] * x[(p, j)];
            }
            x[(i, j)] = s / lu[(i, i)];
        }
    }
    Ok(x)
}
