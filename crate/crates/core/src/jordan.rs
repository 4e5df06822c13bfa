//! Jordan structure at the zero eigenvalue of `A B`, predicted from that of
//! `B A` and measured through nullities of matrix powers.
//!
//! With `rank(A) = rank(B) = r`, each of the `ℓ` zero blocks of `B A` (sizes
//! `k_1..k_ℓ`) grows by one in `A B`, and the remaining `N - r - ℓ` zero blocks
//! of `A B` have size one. The total block count is therefore `N - r`.
//!
//! Jordan form is discontinuous, so measurements are meant for small,
//! integer-friendly matrices. Any singular value inside the guard band
//! `[0.01, 100] x cutoff` makes the measurement refuse with
//! [`LinalgError::AmbiguousRank`].

pub mod fixtures;

use num_complex::Complex64;

use crate::densekit::{dotc, matmul, norm2, singular_values, DenseMatrix, ToleranceConfig, EPS};
use crate::error::{LinalgError, Result};
use crate::lowrank::{small_product, FactorPair, JordanChain};

/// Relative rank cutoff for structure measurements when none is configured.
pub const STRUCTURE_RTOL: f64 = 1e-8;

/// Guard band around the cutoff, as multiples of it.
pub const GUARD_BAND: (f64, f64) = (0.01, 100.0);

/// Largest dimension accepted by [`verify_structure`].
pub const MAX_STRUCTURE_DIM: usize = 200;

/// `w_j = nullity((M - λI)^j)` for `j = 1, 2, ...` up to stabilization.
///
/// Empty when `λ` is not an eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct WeyrSequence {
    eigenvalue: Complex64,
    nullities: Vec<usize>,
}

impl WeyrSequence {
    /// Validates monotonicity: strictly increasing except for an optional
    /// final repeat, with nonincreasing first differences.
    pub fn new(eigenvalue: Complex64, nullities: Vec<usize>) -> Result<Self> {
        let malformed = || LinalgError::MalformedWeyr(nullities.clone());
        let mut prev_w = 0;
        let mut prev_d = usize::MAX;
        for (j, &w) in nullities.iter().enumerate() {
            let last = j + 1 == nullities.len();
            if w < prev_w || (w == prev_w && !(last && j > 0)) {
                return Err(malformed());
            }
            let d = w - prev_w;
            if d > prev_d {
                return Err(malformed());
            }
            prev_w = w;
            prev_d = d;
        }
        Ok(Self { eigenvalue, nullities })
    }

    pub fn eigenvalue(&self) -> Complex64 {
        self.eigenvalue
    }

    pub fn nullities(&self) -> &[usize] {
        &self.nullities
    }

    /// Geometric multiplicity `w_1`.
    pub fn geometric_multiplicity(&self) -> usize {
        self.nullities.first().copied().unwrap_or(0)
    }

    /// Algebraic multiplicity, the stabilized nullity.
    pub fn algebraic_multiplicity(&self) -> usize {
        self.nullities.last().copied().unwrap_or(0)
    }
}

/// Jordan block sizes at one eigenvalue, sorted descending.
#[derive(Debug, Clone, PartialEq)]
pub struct JordanStructure {
    eigenvalue: Complex64,
    block_sizes: Vec<usize>,
}

impl JordanStructure {
    pub fn new(eigenvalue: Complex64, mut block_sizes: Vec<usize>) -> Result<Self> {
        if block_sizes.contains(&0) {
            return Err(LinalgError::InvalidArgument("Jordan block sizes must be positive".into()));
        }
        block_sizes.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Self { eigenvalue, block_sizes })
    }

    pub fn eigenvalue(&self) -> Complex64 {
        self.eigenvalue
    }

    pub fn block_sizes(&self) -> &[usize] {
        &self.block_sizes
    }

    pub fn block_count(&self) -> usize {
        self.block_sizes.len()
    }

    pub fn algebraic_multiplicity(&self) -> usize {
        self.block_sizes.iter().sum()
    }

    /// Nullities of `(J - λI)^j` for the Jordan matrix with these blocks,
    /// `j = 1..=k_max`. Empty when there are no blocks.
    pub fn weyr(&self) -> Vec<usize> {
        let kmax = self.block_sizes.first().copied().unwrap_or(0);
        (1..=kmax)
            .map(|j| self.block_sizes.iter().map(|&k| k.min(j)).sum())
            .collect()
    }
}

/// Prediction for the zero eigenvalue of `A B` from that of `B A`.
#[derive(Debug, Clone, PartialEq)]
pub struct StructurePrediction {
    pub predicted: JordanStructure,
    pub source: JordanStructure,
    pub n: usize,
    pub r: usize,
}

/// Predicted versus measured zero structure of `A B`.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureVerification {
    pub prediction: StructurePrediction,
    pub measured: JordanStructure,
    pub matched: bool,
}

/// Relative rank cutoff used for structure decisions.
pub fn structure_rtol(cfg: &ToleranceConfig) -> f64 {
    cfg.rank_rtol.unwrap_or(STRUCTURE_RTOL)
}

/// Rank of a matrix with singular values `sigma` against `rtol * sigma_1`,
/// refusing when a value sits inside the guard band.
fn guarded_rank(sigma: &[f64], rtol: f64) -> Result<usize> {
    let Some(&s1) = sigma.first() else { return Ok(0) };
    if s1 == 0.0 {
        return Ok(0);
    }
    let cutoff = rtol * s1;
    if let Some(&s) = sigma
        .iter()
        .find(|&&s| s >= GUARD_BAND.0 * cutoff && s <= GUARD_BAND.1 * cutoff)
    {
        return Err(LinalgError::AmbiguousRank { sigma: s, cutoff });
    }
    Ok(sigma.iter().filter(|&&s| s > cutoff).count())
}

/// Numeric rank with the structure cutoff and guard band.
pub fn structure_rank(m: &DenseMatrix, cfg: &ToleranceConfig) -> Result<usize> {
    guarded_rank(&singular_values(m)?, structure_rtol(cfg))
}

/// Nullities of successive powers of `M - λI`, each ranked from the power
/// itself.
///
/// At least two powers are measured; afterwards the sequence stops at the
/// first repeated nullity or when the nullity reaches `n`. A power whose
/// largest singular value is at roundoff level of `||M - λI||_2^j` counts as
/// zero.
pub fn weyr_sequence(m: &DenseMatrix, lambda: Complex64, cfg: &ToleranceConfig, kmax: usize) -> Result<WeyrSequence> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare {
            op: "weyr_sequence",
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    if kmax == 0 {
        return Err(LinalgError::InvalidArgument("kmax must be at least 1".into()));
    }
    let n = m.nrows();
    let rtol = structure_rtol(cfg);
    let base = m.shifted(lambda);
    let base_norm = singular_values(&base)?.first().copied().unwrap_or(0.0);

    let mut nullities: Vec<usize> = Vec::new();
    let mut power = base.clone();
    for j in 1..=kmax {
        if j > 1 {
            power = matmul(&base, &power)?;
        }
        let sigma = singular_values(&power)?;
        let roundoff = 100.0 * (j * n.max(1)) as f64 * EPS * base_norm.powi(j as i32);
        let rank = if sigma.first().is_none_or(|&s| s <= roundoff) {
            0
        } else {
            guarded_rank(&sigma, rtol)?
        };
        let w = n - rank;
        if j == 1 && w == 0 {
            return WeyrSequence::new(lambda, nullities);
        }
        let repeated = nullities.last() == Some(&w);
        nullities.push(w);
        if j >= 2 && (repeated || w == n) {
            return WeyrSequence::new(lambda, nullities);
        }
    }
    Err(LinalgError::NotStabilized { kmax, partial: nullities })
}

/// Segre characteristic: the number of blocks of size `>= j` is `w_j - w_{j-1}`.
pub fn blocks_from_weyr(w: &WeyrSequence) -> Result<JordanStructure> {
    let seq = &w.nullities;
    let diffs: Vec<usize> = seq
        .iter()
        .scan(0, |prev, &x| {
            let d = x - *prev;
            *prev = x;
            Some(d)
        })
        .collect();
    let mut sizes = Vec::new();
    for (j, &d) in diffs.iter().enumerate() {
        let next = diffs.get(j + 1).copied().unwrap_or(0);
        if next > d {
            return Err(LinalgError::MalformedWeyr(seq.clone()));
        }
        sizes.extend(std::iter::repeat_n(j + 1, d - next));
    }
    JordanStructure::new(w.eigenvalue, sizes)
}

/// Zero structure of `A B` from that of `B A`: blocks `k_i + 1` plus
/// `N - r - ℓ` blocks of size one.
pub fn predict_zero_structure(n: usize, r: usize, ba_zero: &JordanStructure) -> Result<StructurePrediction> {
    if r == 0 || n == 0 {
        return Err(LinalgError::InvalidArgument(format!(
            "structure prediction needs positive N and r, got N = {n}, r = {r}"
        )));
    }
    if r > n {
        return Err(LinalgError::InvalidArgument(format!("r = {r} exceeds N = {n}")));
    }
    if ba_zero.eigenvalue != Complex64::new(0.0, 0.0) {
        return Err(LinalgError::InvalidArgument(format!(
            "source structure is at eigenvalue {}, expected 0",
            ba_zero.eigenvalue
        )));
    }
    let ell = ba_zero.block_count();
    if ell > n - r {
        return Err(LinalgError::TooManyZeroBlocks { blocks: ell, limit: n - r });
    }
    let mut blocks: Vec<usize> = ba_zero.block_sizes.iter().map(|k| k + 1).collect();
    blocks.extend(std::iter::repeat_n(1, n - r - ell));
    Ok(StructurePrediction {
        predicted: JordanStructure::new(ba_zero.eigenvalue, blocks)?,
        source: ba_zero.clone(),
        n,
        r,
    })
}

/// Measured Jordan structure of `m` at `lambda`.
pub fn measure_structure(m: &DenseMatrix, lambda: Complex64, cfg: &ToleranceConfig) -> Result<JordanStructure> {
    blocks_from_weyr(&weyr_sequence(m, lambda, cfg, m.nrows() + 1)?)
}

/// Predicts the zero structure of `A B` from `B A` and measures it on the
/// explicit product. Desk scale only (`N <= 200`).
pub fn verify_structure(f: &FactorPair, cfg: &ToleranceConfig) -> Result<StructureVerification> {
    let (n, r) = (f.n(), f.rank());
    if n > MAX_STRUCTURE_DIM {
        return Err(LinalgError::InvalidArgument(format!(
            "N = {n} is too large to measure Jordan structure (limit {MAX_STRUCTURE_DIM})"
        )));
    }
    for factor in [f.a(), f.b()] {
        let rank = structure_rank(factor, cfg)?;
        if rank != r {
            return Err(LinalgError::RankDeficient { rank, expected: r });
        }
    }
    let zero = Complex64::new(0.0, 0.0);
    let source = measure_structure(&small_product(f), zero, cfg)?;
    let prediction = predict_zero_structure(n, r, &source)?;
    let measured = measure_structure(&f.to_dense(), zero, cfg)?;
    let matched = measured.block_sizes == prediction.predicted.block_sizes;
    Ok(StructureVerification {
        prediction,
        measured,
        matched,
    })
}

/// Chain `[a, b / κ]` at eigenvalue zero for `M = a b^*`, with `κ = b^* b`.
///
/// Requires `b^* a = 0` up to `zero_eig_atol * ||a|| ||b||`.
pub fn rank_one_chain(a: &[Complex64], b: &[Complex64], cfg: &ToleranceConfig) -> Result<JordanChain> {
    if a.len() != b.len() {
        return Err(LinalgError::BadLength {
            expected: a.len(),
            got: b.len(),
        });
    }
    let (na, nb) = (norm2(a), norm2(b));
    if na == 0.0 || nb == 0.0 {
        return Err(LinalgError::ZeroVector);
    }
    let inner = dotc(b, a).norm();
    if inner > cfg.zero_eig_atol * na * nb {
        return Err(LinalgError::NotOrthogonal { inner });
    }
    let kappa = dotc(b, b).re;
    let scaled: Vec<Complex64> = b.iter().map(|x| x / kappa).collect();
    Ok(JordanChain::new(
        Complex64::new(0.0, 0.0),
        DenseMatrix::from_columns(a.len(), &[a, &scaled[..]]),
    ))
}

/// `(a, b^*)` as a rank-one factor pair, so that `A B = a b^*`.
pub fn rank_one_pair(a: &[Complex64], b: &[Complex64]) -> Result<FactorPair> {
    FactorPair::new(DenseMatrix::column_vector(a), DenseMatrix::column_vector(b).adjoint())
}
