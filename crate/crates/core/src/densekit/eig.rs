//! Dense nonsymmetric eigensolver.
//!
//! Complex input, or any request for eigenvectors, goes through a unitary
//! Hessenberg reduction followed by single-shift complex QR iteration and
//! back substitution on the triangular Schur factor. Real input without
//! vectors takes a real Hessenberg reduction and Francis double-shift QR.

use num_complex::Complex64;

use super::matrix::{norm2, DenseMatrix, ZERO};
use super::qr::Reflector;
use super::tolerance::EPS;
use crate::error::{LinalgError, Result};

/// Iteration budget per eigenvalue before giving up.
const ITERATIONS_PER_EIGENVALUE: usize = 60;

#[derive(Debug, Clone)]
pub struct Eig {
    /// All `n` eigenvalues, with multiplicity.
    pub eigenvalues: Vec<Complex64>,
    /// Unit-norm eigenvectors as columns, index-aligned with `eigenvalues`.
    pub vectors: Option<DenseMatrix>,
}

/// Eigenvalues (and optionally unit eigenvectors) of a square matrix.
pub fn eig_dense(m: &DenseMatrix, want_vectors: bool) -> Result<Eig> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare {
            op: "eig_dense",
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    let n = m.nrows();
    if n == 0 {
        return Ok(Eig {
            eigenvalues: Vec::new(),
            vectors: want_vectors.then(|| DenseMatrix::zeros(0, 0)),
        });
    }
    if !want_vectors {
        if let Some(a) = m.to_real_row_major() {
            return Ok(Eig {
                eigenvalues: real_eigenvalues(a, n)?,
                vectors: None,
            });
        }
    }

    let mut h = m.clone();
    let mut z = want_vectors.then(|| DenseMatrix::identity(n));
    hessenberg(&mut h, z.as_mut());
    let eigenvalues = complex_schur(&mut h, z.as_mut())?;
    let vectors = z.map(|z| schur_eigenvectors(&h, &z));
    Ok(Eig { eigenvalues, vectors })
}

/// Reduces `h` to upper Hessenberg form in place, accumulating `Q` into `q`.
fn hessenberg(h: &mut DenseMatrix, mut q: Option<&mut DenseMatrix>) {
    let n = h.nrows();
    for k in 0..n.saturating_sub(2) {
        let (refl, alpha) = Reflector::annihilate(&h.column(k)[k + 1..]);
        if refl.tau == 0.0 {
            continue;
        }
        refl.apply_left(h, k + 1, k + 1..n);
        refl.apply_right(h, k + 1, 0..n);
        let col = h.column_mut(k);
        col[k + 1] = alpha;
        col[k + 2..].iter_mut().for_each(|x| *x = ZERO);
        if let Some(q) = q.as_deref_mut() {
            refl.apply_right(q, k + 1, 0..n);
        }
    }
}

#[inline]
fn cabs1(z: Complex64) -> f64 {
    z.re.abs() + z.im.abs()
}

/// Plane rotation `G = [[c, s], [-conj(s), c]]` with `G [x; y] = [r; 0]`.
fn givens(x: Complex64, y: Complex64) -> (f64, Complex64, Complex64) {
    if y == ZERO {
        return (1.0, ZERO, x);
    }
    if x == ZERO {
        let ny = y.norm();
        return (0.0, y.conj() / ny, Complex64::new(ny, 0.0));
    }
    let nx = x.norm();
    let nrm = nx.hypot(y.norm());
    let phase = x / nx;
    (nx / nrm, phase * y.conj() / nrm, phase * nrm)
}

/// Complex Schur form by single-shift QR on a Hessenberg matrix.
///
/// With `z` present the full triangular factor is formed in `h` and the
/// Schur vectors are accumulated; otherwise only the active window is
/// updated.
fn complex_schur(h: &mut DenseMatrix, mut z: Option<&mut DenseMatrix>) -> Result<Vec<Complex64>> {
    let n = h.nrows();
    let full = z.is_some();
    let mut eigenvalues = vec![ZERO; n];
    let hnorm = h.norm_max().max(f64::MIN_POSITIVE);
    let budget = ITERATIONS_PER_EIGENVALUE * n.max(10);
    let mut total = 0usize;
    let mut its = 0usize;
    let mut hi = n - 1;

    loop {
        if hi == 0 {
            eigenvalues[0] = h[(0, 0)];
            break;
        }
        let mut l = hi;
        while l > 0 {
            let mut s = cabs1(h[(l - 1, l - 1)]) + cabs1(h[(l, l)]);
            if s == 0.0 {
                s = hnorm;
            }
            if cabs1(h[(l, l - 1)]) <= EPS * s {
                h[(l, l - 1)] = ZERO;
                break;
            }
            l -= 1;
        }
        if l == hi {
            eigenvalues[hi] = h[(hi, hi)];
            hi -= 1;
            its = 0;
            continue;
        }
        total += 1;
        its += 1;
        if total > budget {
            return Err(LinalgError::NoConvergence {
                op: "eig_dense",
                iterations: total,
                residual: h[(hi, hi - 1)].norm(),
            });
        }

        let shift = if its.is_multiple_of(10) {
            h[(hi, hi)] + 0.75 * h[(hi, hi - 1)].re.abs()
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };

        let col_end = if full { n } else { hi + 1 };
        let row_start = if full { 0 } else { l };
        for k in l..hi {
            let (x, y) = if k == l {
                (h[(l, l)] - shift, h[(l + 1, l)])
            } else {
                (h[(k, k - 1)], h[(k + 1, k - 1)])
            };
            let (c, s, r) = givens(x, y);
            let first_col = if k == l { l } else {
                h[(k, k - 1)] = r;
                h[(k + 1, k - 1)] = ZERO;
                k
            };
            for j in first_col..col_end {
                let a = h[(k, j)];
                let b = h[(k + 1, j)];
                h[(k, j)] = a * c + s * b;
                h[(k + 1, j)] = b * c - s.conj() * a;
            }
            let row_end = (k + 2).min(hi) + 1;
            rotate_pair_right(h, k, row_start..row_end, c, s);
            if let Some(z) = z.as_deref_mut() {
                rotate_pair_right(z, k, 0..n, c, s);
            }
        }
    }
    Ok(eigenvalues)
}

/// `M[:, k], M[:, k+1] <- (M G^*)` restricted to `rows`.
fn rotate_pair_right(m: &mut DenseMatrix, k: usize, rows: std::ops::Range<usize>, c: f64, s: Complex64) {
    let sc = s.conj();
    let (ck, ck1) = m.two_columns_mut(k, k + 1);
    for i in rows {
        let a = ck[i];
        let b = ck1[i];
        ck[i] = a * c + b * sc;
        ck1[i] = b * c - a * s;
    }
}

/// Eigenvalue of `[[a, b], [c, d]]` closer to `d`.
fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mid = (a + d) * 0.5;
    let (r1, r2) = (mid + disc, mid - disc);
    if (r1 - d).norm() <= (r2 - d).norm() {
        r1
    } else {
        r2
    }
}

/// Unit eigenvectors from an upper-triangular Schur factor `t` and Schur
/// vectors `z`.
fn schur_eigenvectors(t: &DenseMatrix, z: &DenseMatrix) -> DenseMatrix {
    let n = t.nrows();
    let tnorm = t.norm_max().max(f64::MIN_POSITIVE);
    let smin = (EPS * tnorm).max(f64::MIN_POSITIVE / EPS);
    let mut out = DenseMatrix::zeros(n, n);
    let mut x = vec![ZERO; n];
    for k in 0..n {
        let lambda = t[(k, k)];
        x[..=k].iter_mut().for_each(|v| *v = ZERO);
        x[k] = Complex64::new(1.0, 0.0);
        for i in (0..k).rev() {
            let mut s = ZERO;
            for j in i + 1..=k {
                s += t[(i, j)] * x[j];
            }
            let mut d = t[(i, i)] - lambda;
            if d.norm() < smin {
                d = Complex64::new(smin, 0.0);
            }
            x[i] = -s / d;
            let big = x[i].norm();
            if big > 1e100 {
                let inv = 1.0 / big;
                x[i..=k].iter_mut().for_each(|v| *v *= inv);
            }
        }
        let col = out.column_mut(k);
        for (j, &xj) in x[..=k].iter().enumerate() {
            if xj != ZERO {
                for (c, &zij) in col.iter_mut().zip(z.column(j)) {
                    *c += zij * xj;
                }
            }
        }
        let nrm = norm2(col);
        col.iter_mut().for_each(|v| *v /= nrm);
    }
    out
}

/// Row-major real matrix with 1-based accessors, used by the real path.
struct RealMat {
    n: usize,
    a: Vec<f64>,
}

impl RealMat {
    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.a[(i - 1) * self.n + (j - 1)]
    }

    #[inline]
    fn at_mut(&mut self, i: usize, j: usize) -> &mut f64 {
        &mut self.a[(i - 1) * self.n + (j - 1)]
    }
}

fn real_eigenvalues(a: Vec<f64>, n: usize) -> Result<Vec<Complex64>> {
    let mut m = RealMat { n, a };
    real_hessenberg(&mut m);
    real_francis(&mut m)
}

/// Householder reduction of a real row-major matrix to Hessenberg form.
fn real_hessenberg(m: &mut RealMat) {
    let n = m.n;
    let mut v = vec![0.0; n];
    let mut w = vec![0.0; n];
    for k in 1..n.saturating_sub(1) {
        // Column k below the subdiagonal: rows k+1..=n.
        let len = n - k;
        let mut nrm = 0.0f64;
        for i in 0..len {
            v[i] = m.at(k + 1 + i, k);
            nrm = nrm.hypot(v[i]);
        }
        if nrm == 0.0 {
            continue;
        }
        let alpha = if v[0] > 0.0 { -nrm } else { nrm };
        v[0] -= alpha;
        let vv: f64 = v[..len].iter().map(|x| x * x).sum();
        if vv == 0.0 {
            continue;
        }
        let tau = 2.0 / vv;
        // Left: rows k+1..=n, columns k..=n.
        w[..n].iter_mut().for_each(|x| *x = 0.0);
        for i in 0..len {
            let vi = v[i];
            let row = (k + i) * n;
            for j in k - 1..n {
                w[j] += vi * m.a[row + j];
            }
        }
        for i in 0..len {
            let f = tau * v[i];
            let row = (k + i) * n;
            for j in k - 1..n {
                m.a[row + j] -= f * w[j];
            }
        }
        // Right: all rows, columns k+1..=n.
        for r in 0..n {
            let row = &mut m.a[r * n + k..r * n + n];
            let s: f64 = row.iter().zip(&v[..len]).map(|(a, b)| a * b).sum::<f64>() * tau;
            for (a, b) in row.iter_mut().zip(&v[..len]) {
                *a -= s * b;
            }
        }
        *m.at_mut(k + 1, k) = alpha;
        for i in k + 2..=n {
            *m.at_mut(i, k) = 0.0;
        }
    }
}

/// Francis double-shift QR on a real Hessenberg matrix (eigenvalues only).
fn real_francis(m: &mut RealMat) -> Result<Vec<Complex64>> {
    let n = m.n;
    let mut wr = vec![0.0; n + 1];
    let mut wi = vec![0.0; n + 1];
    let mut anorm = 0.0;
    for i in 1..=n {
        for j in i.saturating_sub(1).max(1)..=n {
            anorm += m.at(i, j).abs();
        }
    }
    let mut nn = n;
    let mut t = 0.0;
    let mut total = 0usize;
    let budget = ITERATIONS_PER_EIGENVALUE * n.max(10);
    while nn >= 1 {
        let mut its = 0usize;
        loop {
            let mut l = nn;
            while l >= 2 {
                let mut s = m.at(l - 1, l - 1).abs() + m.at(l, l).abs();
                if s == 0.0 {
                    s = anorm;
                }
                if m.at(l, l - 1).abs() <= EPS * s {
                    *m.at_mut(l, l - 1) = 0.0;
                    break;
                }
                l -= 1;
            }
            let mut x = m.at(nn, nn);
            if l == nn {
                wr[nn] = x + t;
                wi[nn] = 0.0;
                nn -= 1;
                break;
            }
            let mut y = m.at(nn - 1, nn - 1);
            let mut w = m.at(nn, nn - 1) * m.at(nn - 1, nn);
            if l == nn - 1 {
                let p = 0.5 * (y - x);
                let q = p * p + w;
                let mut z = q.abs().sqrt();
                x += t;
                if q >= 0.0 {
                    z = p + z.copysign(p);
                    wr[nn - 1] = x + z;
                    wr[nn] = x + z;
                    if z != 0.0 {
                        wr[nn] = x - w / z;
                    }
                    wi[nn - 1] = 0.0;
                    wi[nn] = 0.0;
                } else {
                    wr[nn - 1] = x + p;
                    wr[nn] = x + p;
                    wi[nn - 1] = -z;
                    wi[nn] = z;
                }
                nn = nn.saturating_sub(2);
                break;
            }
            total += 1;
            if total > budget {
                return Err(LinalgError::NoConvergence {
                    op: "eig_dense",
                    iterations: total,
                    residual: m.at(nn, nn - 1).abs(),
                });
            }
            if its > 0 && its.is_multiple_of(10) {
                t += x;
                for i in 1..=nn {
                    *m.at_mut(i, i) -= x;
                }
                let s = m.at(nn, nn - 1).abs() + m.at(nn - 1, nn - 2).abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;

            let (mut p, mut q, mut r);
            let mut mm = nn - 2;
            loop {
                let z = m.at(mm, mm);
                let r0 = x - z;
                let s0 = y - z;
                p = (r0 * s0 - w) / m.at(mm + 1, mm) + m.at(mm, mm + 1);
                q = m.at(mm + 1, mm + 1) - z - r0 - s0;
                r = m.at(mm + 2, mm + 1);
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if mm == l {
                    break;
                }
                let u = m.at(mm, mm - 1).abs() * (q.abs() + r.abs());
                let v = p.abs() * (m.at(mm - 1, mm - 1).abs() + z.abs() + m.at(mm + 1, mm + 1).abs());
                if u <= EPS * v {
                    break;
                }
                mm -= 1;
            }
            for i in mm + 2..=nn {
                *m.at_mut(i, i - 2) = 0.0;
                if i != mm + 2 {
                    *m.at_mut(i, i - 3) = 0.0;
                }
            }
            let mut k = mm;
            while k < nn {
                if k != mm {
                    p = m.at(k, k - 1);
                    q = m.at(k + 1, k - 1);
                    r = if k != nn - 1 { m.at(k + 2, k - 1) } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                let s = (p * p + q * q + r * r).sqrt().copysign(p);
                if s != 0.0 {
                    if k == mm {
                        if l != mm {
                            *m.at_mut(k, k - 1) = -m.at(k, k - 1);
                        }
                    } else {
                        *m.at_mut(k, k - 1) = -s * x;
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    let z = r / s;
                    q /= p;
                    r /= p;
                    for j in k..=nn {
                        let mut pp = m.at(k, j) + q * m.at(k + 1, j);
                        if k != nn - 1 {
                            pp += r * m.at(k + 2, j);
                            *m.at_mut(k + 2, j) -= pp * z;
                        }
                        *m.at_mut(k + 1, j) -= pp * y;
                        *m.at_mut(k, j) -= pp * x;
                    }
                    let mmin = nn.min(k + 3);
                    for i in l..=mmin {
                        let mut pp = x * m.at(i, k) + y * m.at(i, k + 1);
                        if k != nn - 1 {
                            pp += z * m.at(i, k + 2);
                            *m.at_mut(i, k + 2) -= pp * r;
                        }
                        *m.at_mut(i, k + 1) -= pp * q;
                        *m.at_mut(i, k) -= pp;
                    }
                }
                k += 1;
            }
        }
    }
    Ok((1..=n).map(|i| Complex64::new(wr[i], wi[i])).collect())
}
