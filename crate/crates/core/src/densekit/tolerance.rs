use crate::error::{LinalgError, Result};

/// Machine epsilon for `f64` (2^-52).
pub const EPS: f64 = f64::EPSILON;

/// Numerical thresholds shared by every module.
///
/// `rank_rtol = None` selects the dimension-dependent default
/// `max(nrows, ncols) * EPS` for plain rank decisions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceConfig {
    /// Relative singular-value cutoff.
    pub rank_rtol: Option<f64>,
    /// Eigenvalues with `|lambda| <= zero_eig_atol * scale` count as zero.
    pub zero_eig_atol: f64,
    /// Acceptance threshold for normalized eigenpair residuals.
    pub residual_rtol: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            rank_rtol: None,
            zero_eig_atol: EPS.sqrt(),
            residual_rtol: 1e-9,
        }
    }
}

impl ToleranceConfig {
    /// Validates that every explicit threshold lies in `[0, 1)`.
    pub fn new(rank_rtol: Option<f64>, zero_eig_atol: f64, residual_rtol: f64) -> Result<Self> {
        let cfg = Self {
            rank_rtol,
            zero_eig_atol,
            residual_rtol,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let in_range = |x: f64| (0.0..1.0).contains(&x);
        let fields = [
            ("rank_rtol", self.rank_rtol.unwrap_or(0.0)),
            ("zero_eig_atol", self.zero_eig_atol),
            ("residual_rtol", self.residual_rtol),
        ];
        for (name, value) in fields {
            if !in_range(value) {
                return Err(LinalgError::InvalidArgument(format!(
                    "{name} = {value} must lie in [0, 1)"
                )));
            }
        }
        Ok(())
    }

    pub fn with_rank_rtol(mut self, rtol: f64) -> Self {
        self.rank_rtol = Some(rtol);
        self
    }

    pub fn with_zero_eig_atol(mut self, atol: f64) -> Self {
        self.zero_eig_atol = atol;
        self
    }

    pub fn with_residual_rtol(mut self, rtol: f64) -> Self {
        self.residual_rtol = rtol;
        self
    }

    /// Relative singular-value cutoff for an `nrows x ncols` matrix.
    pub fn rank_cutoff(&self, nrows: usize, ncols: usize) -> f64 {
        self.rank_rtol
            .unwrap_or_else(|| nrows.max(ncols).max(1) as f64 * EPS)
    }
}
