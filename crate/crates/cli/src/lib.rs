//! Command-line front end: Matrix Market I/O, fixture generation and the
//! `eig`, `jordan`, `bench`, `factor` and `fixture` subcommands.
//!
//! Exit codes: 0 success, 2 residual or verification failure, 3 input or
//! assumption error, 4 refusal because a rank decision was ambiguous.

pub mod commands;
pub mod mtx;
pub mod report;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lowrank_core::{LinalgError, ToleranceConfig};

pub use mtx::{read_matrix_market, write_matrix_market, MtxError};
pub use report::RunReport;

#[derive(Debug, Parser)]
#[command(name = "lowrank", version, about = "Eigenvalues and Jordan structure of low-rank matrices X = A B")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct GlobalArgs {
    /// Write the JSON report to this file ("-" for stdout).
    #[arg(long, global = true, value_name = "FILE")]
    pub json: Option<PathBuf>,
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Relative singular-value cutoff for rank decisions.
    #[arg(long = "tol-rank", global = true, value_name = "RTOL")]
    pub tol_rank: Option<f64>,
    /// Eigenvalues below this times the matrix scale count as zero.
    #[arg(long = "tol-zero", global = true, value_name = "ATOL")]
    pub tol_zero: Option<f64>,
    /// Largest accepted normalized eigenvector residual.
    #[arg(long = "tol-residual", global = true, value_name = "RTOL")]
    pub tol_residual: Option<f64>,
}

impl GlobalArgs {
    pub fn tolerances(&self) -> Result<ToleranceConfig, CliError> {
        let d = ToleranceConfig::default();
        ToleranceConfig::new(
            self.tol_rank.or(d.rank_rtol),
            self.tol_zero.unwrap_or(d.zero_eig_atol),
            self.tol_residual.unwrap_or(d.residual_rtol),
        )
        .map_err(CliError::from)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Nonzero eigenvalues (and eigenvectors) of A B or of a dense low-rank X.
    Eig(EigArgs),
    /// Predict and measure the zero-eigenvalue Jordan structure of A B.
    Jordan(JordanArgs),
    /// Time the low-rank path on random factors, optionally against a dense solve.
    Bench(BenchArgs),
    /// Factor a dense matrix and write the factors.
    Factor(FactorArgs),
    /// Write fixture matrices.
    Fixture(FixtureArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct EigArgs {
    /// Left factor A (N x r).
    #[arg(long, value_name = "FILE")]
    pub a: Option<PathBuf>,
    /// Right factor B (r x N).
    #[arg(long, value_name = "FILE")]
    pub b: Option<PathBuf>,
    /// Dense N x N input, factored first.
    #[arg(long, value_name = "FILE", conflicts_with_all = ["b"])]
    pub x: Option<PathBuf>,
    /// Rank used when factoring --x (default: numeric rank).
    #[arg(long)]
    pub rank: Option<usize>,
    /// Use the symmetric path (X = A S A^*); with --a, --s gives the middle factor.
    #[arg(long)]
    pub symmetric: bool,
    /// Middle factor S for --symmetric with --a (default: identity).
    #[arg(long, value_name = "FILE", requires = "symmetric")]
    pub s: Option<PathBuf>,
    /// Compute eigenvectors and residuals.
    #[arg(long)]
    pub vectors: bool,
    /// Write the lifted eigenvectors W (implies --vectors).
    #[arg(long = "vectors-out", value_name = "FILE")]
    pub vectors_out: Option<PathBuf>,
    /// Cross-check against a dense eigensolve of the explicit matrix.
    #[arg(long)]
    pub oracle: bool,
}

#[derive(Debug, Clone, Default, Args)]
pub struct JordanArgs {
    #[arg(long, value_name = "FILE")]
    pub a: PathBuf,
    #[arg(long, value_name = "FILE")]
    pub b: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub r: usize,
    /// Timed low-rank trials (after one warm-up run).
    #[arg(long, default_value_t = 5)]
    pub trials: usize,
    #[arg(long)]
    pub symmetric: bool,
    #[arg(long)]
    pub vectors: bool,
    /// Also time a dense eigensolve of the explicit product.
    #[arg(long = "dense-baseline")]
    pub dense_baseline: bool,
    /// Timed dense trials (after one warm-up run when N <= 1000).
    #[arg(long = "dense-trials", default_value_t = 1)]
    pub dense_trials: usize,
    /// Largest N for which the dense baseline runs.
    #[arg(long = "dense-limit", default_value_t = 3000)]
    pub dense_limit: usize,
}

impl Default for BenchArgs {
    fn default() -> Self {
        Self {
            n: 100,
            r: 5,
            trials: 5,
            symmetric: false,
            vectors: false,
            dense_baseline: false,
            dense_trials: 1,
            dense_limit: 3000,
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct FactorArgs {
    #[arg(long, value_name = "FILE")]
    pub x: PathBuf,
    #[arg(long)]
    pub rank: Option<usize>,
    /// Produce X = A S A^* (writes A.mtx and S.mtx) instead of X = A B.
    #[arg(long)]
    pub symmetric: bool,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FixtureKind {
    /// A = e1 (N x 1), B = e1^T.
    E1,
    /// Rank-one a b^T with a orthogonal to b in R^3.
    Orthogonal,
    /// A = [e1, e2] (4 x 2), B A = J_2(0).
    Chain,
    /// Gaussian factors A, B.
    Random,
    /// Dense X = G H of rank r.
    Lowrank,
    /// Dense symmetric X = G S G^T of rank r, plus its factors A and S.
    Symmetric,
    /// Integer factors with B A similar to the Jordan matrix given by --blocks.
    Jordan,
}

#[derive(Debug, Clone, Args)]
pub struct FixtureArgs {
    #[arg(value_enum)]
    pub kind: FixtureKind,
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub r: usize,
    /// Complex entries for random factors.
    #[arg(long)]
    pub complex: bool,
    /// Jordan blocks of B A as eigenvalue:size pairs, e.g. "0:2,3:1".
    #[arg(long)]
    pub blocks: Option<String>,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Mtx(#[from] MtxError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("{0}")]
    Input(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Linalg(LinalgError::AmbiguousRank { .. }) => 4,
            _ => 3,
        }
    }
}

/// How a completed run should exit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// A residual, oracle comparison or structure match failed.
    Failed,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::Failed => 2,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: RunReport,
    pub status: Status,
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let g = &cli.global;
    match &cli.command {
        Command::Eig(a) => commands::eig(g, a),
        Command::Jordan(a) => commands::jordan(g, a),
        Command::Bench(a) => commands::bench(g, a),
        Command::Factor(a) => commands::factor(g, a),
        Command::Fixture(a) => commands::fixture(g, a),
    }
}
