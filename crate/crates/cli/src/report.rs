//! Machine-readable run reports (JSON, `"schema": 1`).

use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Inputs {
    pub n: usize,
    pub r: usize,
    pub symmetric: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureReport {
    /// Zero-eigenvalue blocks of `B A`.
    pub source: Vec<usize>,
    pub predicted: Vec<usize>,
    pub measured: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    /// Number of nonzero eigenvalues of the explicit product.
    pub count: usize,
    pub max_relative_error: f64,
    pub agrees: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub trials: usize,
    pub lowrank_seconds_median: f64,
    pub dense_seconds_median: Option<f64>,
    pub measured_speedup: Option<f64>,
    /// Dense model flops over low-rank model flops.
    pub model_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorReport {
    pub rank: usize,
    /// Frobenius norm of the discarded part (general factorization only).
    pub discarded_error: Option<f64>,
    pub outputs: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema: u32,
    pub command: String,
    pub inputs: Inputs,
    pub seed: Option<u64>,
    /// `(re, im)` pairs, ordered by decreasing modulus.
    pub eigenvalues: Vec<(f64, f64)>,
    pub dropped: Option<usize>,
    /// Largest normalized eigenvector residual; null when vectors were not computed.
    pub residual_max: Option<f64>,
    pub flops_model_lowrank: Option<u64>,
    pub flops_model_dense: Option<u64>,
    pub wall_time_seconds: f64,
    pub structure: Option<StructureReport>,
    #[serde(rename = "match")]
    pub matched: Option<bool>,
    pub oracle: Option<OracleReport>,
    pub bench: Option<BenchReport>,
    pub factor: Option<FactorReport>,
    pub warnings: Vec<String>,
}

impl RunReport {
    pub fn new(command: &str, inputs: Inputs) -> Self {
        Self {
            schema: SCHEMA_VERSION,
            command: command.to_string(),
            inputs,
            seed: None,
            eigenvalues: Vec::new(),
            dropped: None,
            residual_max: None,
            flops_model_lowrank: None,
            flops_model_dense: None,
            wall_time_seconds: 0.0,
            structure: None,
            matched: None,
            oracle: None,
            bench: None,
            factor: None,
            warnings: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report fields are serializable")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    /// Short human-readable summary.
    pub fn summary(&self) -> String {
        let mut lines = vec![format!(
            "{}: N = {}, r = {}{}",
            self.command,
            self.inputs.n,
            self.inputs.r,
            if self.inputs.symmetric { ", symmetric" } else { "" }
        )];
        if !self.eigenvalues.is_empty() || self.dropped.is_some() {
            let shown: Vec<String> = self
                .eigenvalues
                .iter()
                .take(8)
                .map(|(re, im)| if *im == 0.0 { format!("{re:.6e}") } else { format!("{re:.6e}{im:+.6e}i") })
                .collect();
            let more = if self.eigenvalues.len() > 8 { ", ..." } else { "" };
            lines.push(format!("eigenvalues ({}): [{}{}]", self.eigenvalues.len(), shown.join(", "), more));
        }
        if let Some(d) = self.dropped {
            lines.push(format!("dropped as zero: {d}"));
        }
        if let Some(r) = self.residual_max {
            lines.push(format!("max residual: {r:.3e}"));
        }
        if let Some(o) = &self.oracle {
            lines.push(format!(
                "dense oracle: {} eigenvalues, max relative error {:.3e} ({})",
                o.count,
                o.max_relative_error,
                if o.agrees { "agrees" } else { "DISAGREES" }
            ));
        }
        if let Some(s) = &self.structure {
            lines.push(format!(
                "zero blocks: B A {:?}, predicted {:?}, measured {:?}",
                s.source, s.predicted, s.measured
            ));
        }
        if let Some(m) = self.matched {
            lines.push(format!("match: {m}"));
        }
        if let (Some(l), Some(d)) = (self.flops_model_lowrank, self.flops_model_dense) {
            lines.push(format!("model flops: low-rank {l}, dense {d}"));
        }
        if let Some(b) = &self.bench {
            let mut s = format!("low-rank median {:.6} s over {} trials", b.lowrank_seconds_median, b.trials);
            if let (Some(d), Some(x)) = (b.dense_seconds_median, b.measured_speedup) {
                s.push_str(&format!("; dense median {d:.6} s; speedup {x:.1}x"));
            }
            lines.push(s);
        }
        if let Some(f) = &self.factor {
            lines.push(format!("factor rank {}; wrote {}", f.rank, f.outputs.join(", ")));
        }
        for w in &self.warnings {
            lines.push(format!("warning: {w}"));
        }
        lines.join("\n")
    }
}
