use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{LinalgError, Result};

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense complex matrix stored in column-major order.
///
/// Zero-extent dimensions are allowed so that a rank-0 factorization
/// (an `N x 0` times `0 x N` pair) is representable.
#[derive(Clone, PartialEq)]
pub struct DenseMatrix {
    nrows: usize,
    ncols: usize,
    data: Vec<Complex64>,
}

impl DenseMatrix {
    /// Builds a matrix from column-major data, rejecting wrong lengths and
    /// non-finite entries.
    pub fn new(nrows: usize, ncols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != nrows * ncols {
            return Err(LinalgError::BadLength {
                expected: nrows * ncols,
                got: data.len(),
            });
        }
        if let Some(pos) = data.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(LinalgError::NonFinite {
                row: pos % nrows.max(1),
                col: pos / nrows.max(1),
            });
        }
        Ok(Self { nrows, ncols, data })
    }

    pub(crate) fn from_vec_unchecked(nrows: usize, ncols: usize, data: Vec<Complex64>) -> Self {
        debug_assert_eq!(data.len(), nrows * ncols);
        Self { nrows, ncols, data }
    }

    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self::from_vec_unchecked(nrows, ncols, vec![ZERO; nrows * ncols])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Builds a matrix entry by entry.
    ///
    /// Panics if `f` produces a non-finite value.
    pub fn from_fn(nrows: usize, ncols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(nrows * ncols);
        for j in 0..ncols {
            for i in 0..nrows {
                let z = f(i, j);
                assert!(z.re.is_finite() && z.im.is_finite(), "non-finite entry at ({i}, {j})");
                data.push(z);
            }
        }
        Self::from_vec_unchecked(nrows, ncols, data)
    }

    /// Builds a real matrix from row slices. Panics on ragged input.
    pub fn from_real_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.as_ref().len());
        assert!(
            rows.iter().all(|r| r.as_ref().len() == ncols),
            "ragged rows"
        );
        Self::from_fn(nrows, ncols, |i, j| Complex64::new(rows[i].as_ref()[j], 0.0))
    }

    /// Builds a real matrix from a row-major slice.
    pub fn from_real_row_major(nrows: usize, ncols: usize, values: &[f64]) -> Self {
        assert_eq!(values.len(), nrows * ncols, "row-major data length");
        Self::from_fn(nrows, ncols, |i, j| Complex64::new(values[i * ncols + j], 0.0))
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let d: Vec<Complex64> = diag.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_diagonal(&d)
    }

    /// Stacks equal-length vectors as columns.
    pub fn from_columns<C: AsRef<[Complex64]>>(nrows: usize, columns: &[C]) -> Self {
        let mut data = Vec::with_capacity(nrows * columns.len());
        for c in columns {
            assert_eq!(c.as_ref().len(), nrows, "column length");
            data.extend_from_slice(c.as_ref());
        }
        Self::from_fn(nrows, columns.len(), |i, j| data[j * nrows + i])
    }

    pub fn column_vector(v: &[Complex64]) -> Self {
        Self::from_columns(v.len(), &[v])
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.nrows
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.ncols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.nrows, self.ncols)
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.nrows == self.ncols
    }

    /// Column-major entries.
    #[inline]
    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    #[inline]
    pub fn column(&self, j: usize) -> &[Complex64] {
        &self.data[j * self.nrows..(j + 1) * self.nrows]
    }

    #[inline]
    pub(crate) fn column_mut(&mut self, j: usize) -> &mut [Complex64] {
        &mut self.data[j * self.nrows..(j + 1) * self.nrows]
    }

    /// Mutable access to two distinct columns.
    pub(crate) fn two_columns_mut(&mut self, p: usize, q: usize) -> (&mut [Complex64], &mut [Complex64]) {
        assert!(p != q);
        let n = self.nrows;
        if p < q {
            let (lo, hi) = self.data.split_at_mut(q * n);
            (&mut lo[p * n..(p + 1) * n], &mut hi[..n])
        } else {
            let (lo, hi) = self.data.split_at_mut(p * n);
            let (a, b) = (&mut hi[..n], &mut lo[q * n..(q + 1) * n]);
            (a, b)
        }
    }

    pub fn row(&self, i: usize) -> Vec<Complex64> {
        (0..self.ncols).map(|j| self[(i, j)]).collect()
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.nrows.min(self.ncols)).map(|i| self[(i, i)]).collect()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.ncols, self.nrows);
        for j in 0..self.ncols {
            for i in 0..self.nrows {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.ncols, self.nrows);
        for j in 0..self.ncols {
            for i in 0..self.nrows {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    /// Copies the listed columns, in order.
    pub fn select_columns(&self, idx: &[usize]) -> Self {
        let mut data = Vec::with_capacity(self.nrows * idx.len());
        for &j in idx {
            data.extend_from_slice(self.column(j));
        }
        Self::from_vec_unchecked(self.nrows, idx.len(), data)
    }

    /// Copies the listed rows, in order.
    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let mut out = Self::zeros(idx.len(), self.ncols);
        for j in 0..self.ncols {
            for (k, &i) in idx.iter().enumerate() {
                out[(k, j)] = self[(i, j)];
            }
        }
        out
    }

    /// Copies the block `rows x cols`.
    pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Self {
        let (nr, nc) = (rows.len(), cols.len());
        let mut data = Vec::with_capacity(nr * nc);
        for j in cols {
            data.extend_from_slice(&self.column(j)[rows.clone()]);
        }
        Self::from_vec_unchecked(nr, nc, data)
    }

    pub fn scale(&self, alpha: Complex64) -> Self {
        Self::from_vec_unchecked(self.nrows, self.ncols, self.data.iter().map(|&z| z * alpha).collect())
    }

    /// Scales column `j` by `d[j]` (right multiplication by a diagonal).
    pub fn scale_columns(&self, d: &[Complex64]) -> Self {
        assert_eq!(d.len(), self.ncols);
        let mut out = self.clone();
        for (j, &dj) in d.iter().enumerate() {
            out.column_mut(j).iter_mut().for_each(|z| *z *= dj);
        }
        out
    }

    /// Scales row `i` by `d[i]` (left multiplication by a diagonal).
    pub fn scale_rows(&self, d: &[Complex64]) -> Self {
        assert_eq!(d.len(), self.nrows);
        let mut out = self.clone();
        for j in 0..self.ncols {
            for (z, &di) in out.column_mut(j).iter_mut().zip(d) {
                *z *= di;
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape("add", other)?;
        Ok(Self::from_vec_unchecked(
            self.nrows,
            self.ncols,
            self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        ))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape("sub", other)?;
        Ok(Self::from_vec_unchecked(
            self.nrows,
            self.ncols,
            self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        ))
    }

    /// `self - shift * I` for square matrices.
    pub fn shifted(&self, shift: Complex64) -> Self {
        let mut out = self.clone();
        for i in 0..self.nrows.min(self.ncols) {
            out[(i, i)] -= shift;
        }
        out
    }

    fn check_same_shape(&self, op: &'static str, other: &Self) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(LinalgError::DimensionMismatch {
                op,
                left_rows: self.nrows,
                left_cols: self.ncols,
                right_rows: other.nrows,
                right_cols: other.ncols,
            });
        }
        Ok(())
    }

    pub fn norm_fro(&self) -> f64 {
        norm2(&self.data)
    }

    /// Largest entry modulus.
    pub fn norm_max(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Maximum absolute column sum.
    pub fn norm_one(&self) -> f64 {
        (0..self.ncols)
            .map(|j| self.column(j).iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn is_real(&self) -> bool {
        self.data.iter().all(|z| z.im == 0.0)
    }

    /// Largest entry of `|M - M^*|`.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for j in 0..self.ncols.min(self.nrows) {
            for i in 0..=j {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Matrix-vector product `M x`.
    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.ncols, "mul_vec length");
        let mut y = vec![ZERO; self.nrows];
        for (j, &xj) in x.iter().enumerate() {
            if xj == ZERO {
                continue;
            }
            for (yi, &a) in y.iter_mut().zip(self.column(j)) {
                *yi += a * xj;
            }
        }
        y
    }

    /// `M^* x` without forming the adjoint.
    pub fn adjoint_mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.nrows, "adjoint_mul_vec length");
        (0..self.ncols).map(|j| dotc(self.column(j), x)).collect()
    }

    /// Real parts, row-major; `None` if any entry has a nonzero imaginary part.
    pub fn to_real_row_major(&self) -> Option<Vec<f64>> {
        if !self.is_real() {
            return None;
        }
        let mut out = Vec::with_capacity(self.data.len());
        for i in 0..self.nrows {
            for j in 0..self.ncols {
                out.push(self[(i, j)].re);
            }
        }
        Some(out)
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.nrows && j < self.ncols);
        &self.data[j * self.nrows + i]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.nrows && j < self.ncols);
        &mut self.data[j * self.nrows + i]
    }
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DenseMatrix {}x{} [", self.nrows, self.ncols)?;
        for i in 0..self.nrows {
            write!(f, "  ")?;
            for j in 0..self.ncols {
                let z = self[(i, j)];
                if z.im == 0.0 {
                    write!(f, "{:>12.5e} ", z.re)?;
                } else {
                    write!(f, "{:>12.5e}{:+.5e}i ", z.re, z.im)?;
                }
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Euclidean norm, scaled to avoid overflow.
pub fn norm2(v: &[Complex64]) -> f64 {
    let scale = v.iter().map(|z| z.re.abs().max(z.im.abs())).fold(0.0, f64::max);
    if scale == 0.0 {
        return 0.0;
    }
    if !(1e-150..=1e150).contains(&scale) {
        let s: f64 = v.iter().map(|z| (z / scale).norm_sqr()).sum();
        return scale * s.sqrt();
    }
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `x^* y`.
#[inline]
pub fn dotc(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y).fold(ZERO, |acc, (a, b)| acc + a.conj() * b)
}

/// `y += alpha * x`.
#[inline]
pub(crate) fn axpy(alpha: Complex64, x: &[Complex64], y: &mut [Complex64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}
