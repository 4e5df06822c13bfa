//! Integer factor pairs with a prescribed Jordan form of `B A`.
//!
//! With `A = [I_r; C]` and `B = [J - D C, D]` we get `B A = J` exactly; a
//! random integer shear `U` then hides the structure (`A U`, `U^{-1} B`)
//! while keeping every entry an integer. `rank(A) = r` always holds, and
//! `D` is redrawn until `rank(B) = r`, which needs `N - r >= ℓ` where `ℓ` is
//! the number of zero blocks in `J`.

use num_complex::Complex64;
use rand::Rng;

use super::structure_rank;
use crate::densekit::random::{seeded, MatrixRng};
use crate::densekit::{matmul, DenseMatrix, ToleranceConfig};
use crate::lowrank::{FactorPair, JordanChain};

/// Block-diagonal Jordan matrix; each `(λ, k)` is a `k x k` block with `λ`
/// on the diagonal and ones on the superdiagonal.
pub fn jordan_matrix(blocks: &[(i64, usize)]) -> DenseMatrix {
    let n = blocks.iter().map(|b| b.1).sum();
    let mut m = DenseMatrix::zeros(n, n);
    let mut o = 0;
    for &(lambda, k) in blocks {
        for i in 0..k {
            m[(o + i, o + i)] = Complex64::new(lambda as f64, 0.0);
            if i + 1 < k {
                m[(o + i, o + i + 1)] = Complex64::new(1.0, 0.0);
            }
        }
        o += k;
    }
    m
}

/// Integer factors whose small product is similar to a known Jordan matrix.
#[derive(Debug, Clone)]
pub struct JordanFixture {
    pub pair: FactorPair,
    /// Jordan blocks `(λ, size)` of `B A`, in the order used to build it.
    pub blocks: Vec<(i64, usize)>,
    /// `B A = U^{-1} J U`; this is `U^{-1}`.
    pub u_inv: DenseMatrix,
}

impl JordanFixture {
    pub fn n(&self) -> usize {
        self.pair.n()
    }

    pub fn r(&self) -> usize {
        self.pair.rank()
    }

    /// Zero-eigenvalue block sizes of `B A`, sorted descending.
    pub fn zero_blocks(&self) -> Vec<usize> {
        let mut z: Vec<usize> = self.blocks.iter().filter(|b| b.0 == 0).map(|b| b.1).collect();
        z.sort_unstable_by(|a, b| b.cmp(a));
        z
    }

    /// Distinct nonzero eigenvalues of `B A`.
    pub fn nonzero_eigenvalues(&self) -> Vec<i64> {
        let mut v: Vec<i64> = self.blocks.iter().map(|b| b.0).filter(|&l| l != 0).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Block sizes of `B A` at `lambda`, sorted descending.
    pub fn blocks_at(&self, lambda: i64) -> Vec<usize> {
        let mut z: Vec<usize> = self.blocks.iter().filter(|b| b.0 == lambda).map(|b| b.1).collect();
        z.sort_unstable_by(|a, b| b.cmp(a));
        z
    }

    /// Jordan chain of `B A` spanning block `index`.
    pub fn chain(&self, index: usize) -> JordanChain {
        let offset: usize = self.blocks[..index].iter().map(|b| b.1).sum();
        let (lambda, k) = self.blocks[index];
        let cols: Vec<usize> = (offset..offset + k).collect();
        JordanChain::new(Complex64::new(lambda as f64, 0.0), self.u_inv.select_columns(&cols))
    }
}

fn small_integer(rng: &mut MatrixRng) -> Complex64 {
    Complex64::new(rng.random_range(-1i64..=1) as f64, 0.0)
}

/// `U = E_1 ... E_m` and `U^{-1}` for random shears `E = I + s e_i e_j^T`.
fn unimodular(r: usize, rng: &mut MatrixRng) -> (DenseMatrix, DenseMatrix) {
    let mut u = DenseMatrix::identity(r);
    let mut u_inv = DenseMatrix::identity(r);
    if r < 2 {
        return (u, u_inv);
    }
    for _ in 0..2 * r {
        let i = rng.random_range(0..r);
        let j = (i + rng.random_range(1..r)) % r;
        let s = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        // U <- U E: column j += s * column i.  U^{-1} <- E^{-1} U^{-1}: row i -= s * row j.
        for row in 0..r {
            let x = u[(row, i)];
            u[(row, j)] += x * s;
        }
        for col in 0..r {
            let x = u_inv[(j, col)];
            u_inv[(i, col)] -= x * s;
        }
    }
    (u, u_inv)
}

/// Builds an `N`-dimensional fixture with `B A` similar to `jordan_matrix(blocks)`.
///
/// Returns `None` when the zero blocks cannot fit (`ℓ > N - r`) or no
/// full-rank `B` turned up.
pub fn build(n: usize, blocks: &[(i64, usize)], conjugate: bool, rng: &mut MatrixRng) -> Option<JordanFixture> {
    let r: usize = blocks.iter().map(|b| b.1).sum();
    let ell = blocks.iter().filter(|b| b.0 == 0).count();
    if r == 0 || r > n || ell > n - r {
        return None;
    }
    let m = n - r;
    let j = jordan_matrix(blocks);
    let cfg = ToleranceConfig::default();
    for _ in 0..64 {
        let cm = DenseMatrix::from_fn(m, r, |_, _| small_integer(rng));
        let d = DenseMatrix::from_fn(r, m, |_, _| small_integer(rng));
        let jdc = j.sub(&matmul(&d, &cm).ok()?).ok()?;
        let a = DenseMatrix::from_fn(n, r, |i, k| {
            if i < r {
                Complex64::new(if i == k { 1.0 } else { 0.0 }, 0.0)
            } else {
                cm[(i - r, k)]
            }
        });
        let b = DenseMatrix::from_fn(r, n, |i, k| if k < r { jdc[(i, k)] } else { d[(i, k - r)] });
        if structure_rank(&b, &cfg).ok()? != r {
            continue;
        }
        let (u, u_inv) = if conjugate {
            unimodular(r, rng)
        } else {
            (DenseMatrix::identity(r), DenseMatrix::identity(r))
        };
        let pair = FactorPair::new(matmul(&a, &u).ok()?, matmul(&u_inv, &b).ok()?).ok()?;
        return Some(JordanFixture {
            pair,
            blocks: blocks.to_vec(),
            u_inv,
        });
    }
    None
}

/// Integer partitions of `s` with parts in descending order.
pub fn partitions(s: usize) -> Vec<Vec<usize>> {
    fn go(rest: usize, max: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest == 0 {
            out.push(prefix.clone());
            return;
        }
        for p in (1..=rest.min(max)).rev() {
            prefix.push(p);
            go(rest - p, p, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(s, s, &mut Vec::new(), &mut out);
    out
}

/// Nonzero blocks filling `size` slots. Variant 0 uses distinct 1x1 blocks;
/// variant 1 starts with a 2x2 block at eigenvalue 2.
fn nonzero_filling(size: usize, variant: usize) -> Vec<(i64, usize)> {
    const VALUES: [i64; 4] = [1, -1, 3, -2];
    let mut blocks = Vec::new();
    let mut left = size;
    if variant == 1 && left >= 2 {
        blocks.push((2, 2));
        left -= 2;
    }
    blocks.extend((0..left).map(|i| (VALUES[i % VALUES.len()], 1)));
    blocks
}

/// Every `N` in `3..=8`, `r` in `1..=min(4, N)` and zero-block partition of
/// every size up to `r` that fits (`ℓ <= N - r`), with one or two nonzero
/// fillings each.
pub fn zero_structure_family(seed: u64) -> Vec<JordanFixture> {
    let mut rng = seeded(seed);
    let mut out = Vec::new();
    for n in 3..=8 {
        for r in 1..=n.min(4) {
            for s in 0..=r {
                for zero in partitions(s) {
                    if zero.len() > n - r {
                        continue;
                    }
                    let variants = if r - s >= 2 { 2 } else { 1 };
                    for variant in 0..variants {
                        let mut blocks: Vec<(i64, usize)> = zero.iter().map(|&k| (0, k)).collect();
                        blocks.extend(nonzero_filling(r - s, variant));
                        let f = build(n, &blocks, true, &mut rng)
                            .expect("feasible fixture: rank(B) = r is generic for random D");
                        out.push(f);
                    }
                }
            }
        }
    }
    out
}

/// Fixtures whose `B A` has a nonzero-eigenvalue block of each length in
/// `2..=4`, paired with the index of that block.
pub fn chain_family(seed: u64, count: usize) -> Vec<(JordanFixture, usize)> {
    let mut rng = seeded(seed);
    let eigen = [2i64, -1, 3, -2, 1];
    let mut out = Vec::with_capacity(count);
    let mut i = 0;
    while out.len() < count {
        let k = 2 + i % 3;
        let lambda = eigen[i % eigen.len()];
        let mut blocks = vec![(lambda, k)];
        match i % 4 {
            1 => blocks.push((0, 1)),
            2 => blocks.push((0, 2)),
            3 => blocks.push((lambda, 1)),
            _ => {}
        }
        let r: usize = blocks.iter().map(|b| b.1).sum();
        let n = r + 1 + i % 5;
        if let Some(f) = build(n, &blocks, true, &mut rng) {
            out.push((f, 0));
        }
        i += 1;
    }
    out
}
