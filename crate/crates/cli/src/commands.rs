use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use lowrank_core::densekit::random::{gaussian, seeded, symmetric as random_symmetric};
use lowrank_core::densekit::{eig_dense, matmul, DenseMatrix};
use lowrank_core::jordan::fixtures;
use lowrank_core::lowrank::{dense_flop_model, dense_nonzero_eigenvalues, flop_model, match_spectra, EigWarning};
use lowrank_core::symmetric::SymmetricEigenResult;
use lowrank_core::{
    lowrank_eig, symmetric_factor, symmetric_factored_eig, truncated_svd_factor, verify_structure, Complex64,
    FactorPair, LinalgError, SymmetricFactorization, ToleranceConfig,
};

use crate::report::{BenchReport, FactorReport, Inputs, OracleReport, RunReport, StructureReport};
use crate::{
    read_matrix_market, write_matrix_market, BenchArgs, CliError, EigArgs, FactorArgs, FixtureArgs, FixtureKind,
    GlobalArgs, JordanArgs, Outcome, Status,
};

/// Relative tolerance of the `--oracle` comparison.
pub const ORACLE_RTOL: f64 = 1e-9;

fn pairs(values: &[Complex64]) -> Vec<(f64, f64)> {
    values.iter().map(|z| (z.re, z.im)).collect()
}

fn real_pairs(values: &[f64]) -> Vec<(f64, f64)> {
    values.iter().map(|&x| (x, 0.0)).collect()
}

fn describe(w: &EigWarning) -> String {
    match w {
        EigWarning::RankDeficient { rank, inner } => {
            format!("B A has numeric rank {rank} < r = {inner}; a lower-rank factorization exists")
        }
        EigWarning::ResidualAboveTolerance { index, residual } => {
            format!("eigenpair {index} has residual {residual:.3e} above tolerance")
        }
        EigWarning::WideFactors { n, inner } => {
            format!("r = {inner} exceeds N = {n}; solved the N x N product directly")
        }
    }
}

fn model_flops(report: &mut RunReport, n: usize, r: usize, symmetric: bool, vectors: bool) {
    report.flops_model_lowrank = flop_model(n, r, symmetric, vectors).ok();
    report.flops_model_dense = Some(dense_flop_model(n, symmetric, vectors));
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.display().to_string(),
        source,
    })
}

fn write_named(dir: &Path, name: &str, m: &DenseMatrix, outputs: &mut Vec<String>) -> Result<(), CliError> {
    let path = dir.join(name);
    write_matrix_market(m, &path)?;
    outputs.push(path.display().to_string());
    Ok(())
}

/// Keeps the `k` leading columns of `Ã` and the matching block of `S̃`.
fn truncate_symmetric(
    f: SymmetricFactorization,
    rank: Option<usize>,
    cfg: &ToleranceConfig,
) -> Result<(SymmetricFactorization, Option<String>), CliError> {
    let Some(k) = rank else { return Ok((f, None)) };
    let r = f.rank();
    if k >= r {
        let note = (k > r).then(|| format!("requested rank {k} exceeds numeric rank {r}; using {r}"));
        return Ok((f, note));
    }
    let cols: Vec<usize> = (0..k).collect();
    let t = SymmetricFactorization::new(f.atilde().select_columns(&cols), f.stilde().submatrix(0..k, 0..k), cfg)?;
    Ok((t, None))
}

fn check_oracle(report: &mut RunReport, x: &DenseMatrix, computed: &[Complex64], cfg: &ToleranceConfig) -> Result<bool, CliError> {
    let reference = dense_nonzero_eigenvalues(x, cfg)?;
    let m = match_spectra(computed, &reference);
    let agrees = m.within(ORACLE_RTOL);
    report.oracle = Some(OracleReport {
        count: reference.len(),
        max_relative_error: m.max_relative_error,
        agrees,
    });
    Ok(agrees)
}

pub fn eig(g: &GlobalArgs, args: &EigArgs) -> Result<Outcome, CliError> {
    let cfg = g.tolerances()?;
    let want_vectors = args.vectors || args.vectors_out.is_some();
    if args.symmetric {
        return eig_symmetric(g, args, &cfg);
    }
    let (pair, dense, mut warnings, start) = match (&args.a, &args.b, &args.x) {
        (Some(a), Some(b), None) => {
            let (a, b) = (read_matrix_market(a)?, read_matrix_market(b)?);
            let start = Instant::now();
            (FactorPair::new(a, b)?, None, Vec::new(), start)
        }
        (None, None, Some(x)) => {
            let x = read_matrix_market(x)?;
            let start = Instant::now();
            let t = truncated_svd_factor(&x, args.rank, &cfg)?;
            let warnings = t.warning.iter().map(|w| w.to_string()).collect();
            (t.pair, Some(x), warnings, start)
        }
        _ => return Err(CliError::Input("eig needs either --a and --b, or --x".into())),
    };
    if args.rank.is_some() && args.x.is_none() {
        return Err(CliError::Input("--rank applies only to --x".into()));
    }
    let result = lowrank_eig(&pair, want_vectors, &cfg)?;
    let elapsed = start.elapsed().as_secs_f64();

    let (n, r) = (pair.n(), pair.rank());
    let mut report = RunReport::new("eig", Inputs { n, r, symmetric: false });
    report.eigenvalues = pairs(&result.lambdas);
    report.dropped = Some(result.dropped);
    report.wall_time_seconds = elapsed;
    model_flops(&mut report, n, r, false, want_vectors);
    if want_vectors {
        report.residual_max = Some(result.max_residual());
    }
    warnings.extend(result.warnings.iter().map(describe));
    report.warnings = warnings;

    let mut ok = result.accepted(&cfg);
    if args.oracle {
        let x = dense.unwrap_or_else(|| pair.to_dense());
        ok &= check_oracle(&mut report, &x, &result.lambdas, &cfg)?;
    }
    if let (Some(path), Some(w)) = (&args.vectors_out, &result.w) {
        write_matrix_market(w, path)?;
    }
    Ok(Outcome {
        report,
        status: if ok { Status::Ok } else { Status::Failed },
    })
}

fn eig_symmetric(_g: &GlobalArgs, args: &EigArgs, cfg: &ToleranceConfig) -> Result<Outcome, CliError> {
    let mut warnings = Vec::new();
    let (f, dense, start) = match (&args.a, &args.x) {
        (Some(a), None) => {
            if args.rank.is_some() {
                return Err(CliError::Input("--rank applies only to --x".into()));
            }
            let a = read_matrix_market(a)?;
            let s = match &args.s {
                Some(p) => read_matrix_market(p)?,
                None => DenseMatrix::identity(a.ncols()),
            };
            let start = Instant::now();
            (SymmetricFactorization::new(a, s, cfg)?, None, start)
        }
        (None, Some(x)) => {
            if args.s.is_some() {
                return Err(CliError::Input("--s applies only to --a".into()));
            }
            let x = read_matrix_market(x)?;
            let start = Instant::now();
            let (f, note) = truncate_symmetric(symmetric_factor(&x, cfg)?, args.rank, cfg)?;
            warnings.extend(note);
            (f, Some(x), start)
        }
        _ => {
            return Err(CliError::Input(
                "eig --symmetric needs exactly one of --a (with optional --s) or --x".into(),
            ))
        }
    };
    if args.b.is_some() {
        return Err(CliError::Input("--b is not used by the symmetric path".into()));
    }
    let result: SymmetricEigenResult = symmetric_factored_eig(&f, cfg)?;
    let elapsed = start.elapsed().as_secs_f64();

    let (n, r) = (f.n(), f.rank());
    let mut report = RunReport::new("eig", Inputs { n, r, symmetric: true });
    report.eigenvalues = real_pairs(&result.lambdas);
    report.dropped = Some(r - result.lambdas.len());
    report.residual_max = Some(result.max_residual());
    report.wall_time_seconds = elapsed;
    model_flops(&mut report, n, r, true, true);
    if result.orthogonality_defect > 1e-10 {
        warnings.push(format!(
            "eigenvectors deviate from orthonormality by {:.3e}",
            result.orthogonality_defect
        ));
    }
    report.warnings = warnings;

    let mut ok = result.accepted(cfg);
    if args.oracle {
        let x = dense.unwrap_or_else(|| f.to_dense());
        let computed: Vec<Complex64> = result.lambdas.iter().map(|&l| Complex64::new(l, 0.0)).collect();
        ok &= check_oracle(&mut report, &x, &computed, cfg)?;
    }
    if let Some(path) = &args.vectors_out {
        write_matrix_market(&result.w, path)?;
    }
    Ok(Outcome {
        report,
        status: if ok { Status::Ok } else { Status::Failed },
    })
}

pub fn jordan(g: &GlobalArgs, args: &JordanArgs) -> Result<Outcome, CliError> {
    let cfg = g.tolerances()?;
    let (a, b) = (read_matrix_market(&args.a)?, read_matrix_market(&args.b)?);
    let start = Instant::now();
    let pair = FactorPair::new(a, b)?;
    let v = verify_structure(&pair, &cfg).map_err(|e| match e {
        LinalgError::RankDeficient { rank, expected } => CliError::Input(format!(
            "structure prediction assumes rank(A) = rank(B) = r = {expected}, but a factor has numeric rank {rank}"
        )),
        other => CliError::Linalg(other),
    })?;
    let mut report = RunReport::new(
        "jordan",
        Inputs {
            n: pair.n(),
            r: pair.rank(),
            symmetric: false,
        },
    );
    report.wall_time_seconds = start.elapsed().as_secs_f64();
    report.structure = Some(StructureReport {
        source: v.prediction.source.block_sizes().to_vec(),
        predicted: v.prediction.predicted.block_sizes().to_vec(),
        measured: v.measured.block_sizes().to_vec(),
    });
    report.matched = Some(v.matched);
    Ok(Outcome {
        report,
        status: if v.matched { Status::Ok } else { Status::Failed },
    })
}

/// Median of `trials` timed runs after one untimed warm-up; returns the last
/// result too.
fn timed<T>(trials: usize, warm_up: bool, mut f: impl FnMut() -> Result<T, CliError>) -> Result<(f64, T), CliError> {
    if warm_up {
        f()?;
    }
    let mut times = Vec::with_capacity(trials);
    let mut last = None;
    for _ in 0..trials.max(1) {
        let t = Instant::now();
        let out = f()?;
        times.push(t.elapsed().as_secs_f64());
        last = Some(out);
    }
    times.sort_by(f64::total_cmp);
    let k = times.len();
    let median = if k % 2 == 1 {
        times[k / 2]
    } else {
        0.5 * (times[k / 2 - 1] + times[k / 2])
    };
    Ok((median, last.expect("at least one trial")))
}

pub fn bench(g: &GlobalArgs, args: &BenchArgs) -> Result<Outcome, CliError> {
    let cfg = g.tolerances()?;
    let (n, r) = (args.n, args.r);
    if n == 0 || r == 0 {
        return Err(CliError::Input("bench needs positive --n and --r".into()));
    }
    let mut rng = seeded(g.seed);
    let mut report = RunReport::new("bench", Inputs { n, r, symmetric: args.symmetric });
    report.seed = Some(g.seed);
    let vectors = args.vectors || args.symmetric;
    model_flops(&mut report, n, r, args.symmetric, vectors);
    match (report.flops_model_lowrank, report.flops_model_dense) {
        (Some(l), Some(d)) if l >= d => report.warnings.push(format!(
            "no compression: low-rank model {l} flops is not below the dense model {d} flops"
        )),
        (None, _) => report.warnings.push(format!("r = {r} exceeds N = {n}; no low-rank flop model")),
        _ => {}
    }

    let mut ok = true;
    let (median, explicit) = if args.symmetric {
        let f = loop {
            let a = gaussian(n, r, false, &mut rng);
            let s = random_symmetric(r, &mut rng);
            if let Ok(f) = SymmetricFactorization::new(a, s, &cfg) {
                break f;
            }
        };
        let (median, res) = timed(args.trials, true, || Ok(symmetric_factored_eig(&f, &cfg)?))?;
        report.eigenvalues = real_pairs(&res.lambdas);
        report.residual_max = Some(res.max_residual());
        ok &= res.accepted(&cfg);
        (median, (args.dense_baseline && n <= args.dense_limit).then(|| f.to_dense()))
    } else {
        let pair = FactorPair::new(gaussian(n, r, false, &mut rng), gaussian(r, n, false, &mut rng))?;
        let (median, res) = timed(args.trials, true, || Ok(lowrank_eig(&pair, vectors, &cfg)?))?;
        report.eigenvalues = pairs(&res.lambdas);
        report.dropped = Some(res.dropped);
        if vectors {
            report.residual_max = Some(res.max_residual());
            ok &= res.accepted(&cfg);
        }
        (median, (args.dense_baseline && n <= args.dense_limit).then(|| pair.to_dense()))
    };
    report.wall_time_seconds = median;

    if args.dense_baseline && explicit.is_none() {
        report.warnings.push(format!(
            "dense baseline skipped: N = {n} exceeds --dense-limit {}",
            args.dense_limit
        ));
    }
    let dense_median = match explicit {
        Some(x) => Some(timed(args.dense_trials, n <= 1000, || Ok(eig_dense(&x, vectors)?))?.0),
        None => None,
    };
    report.bench = Some(BenchReport {
        trials: args.trials.max(1),
        lowrank_seconds_median: median,
        dense_seconds_median: dense_median,
        measured_speedup: dense_median.map(|d| d / median.max(f64::MIN_POSITIVE)),
        model_ratio: report
            .flops_model_lowrank
            .zip(report.flops_model_dense)
            .map(|(l, d)| d as f64 / l as f64),
    });
    Ok(Outcome {
        report,
        status: if ok { Status::Ok } else { Status::Failed },
    })
}

pub fn factor(g: &GlobalArgs, args: &FactorArgs) -> Result<Outcome, CliError> {
    let cfg = g.tolerances()?;
    let x = read_matrix_market(&args.x)?;
    let start = Instant::now();
    ensure_dir(&args.out)?;
    let mut outputs = Vec::new();
    let mut warnings = Vec::new();
    let (r, discarded) = if args.symmetric {
        let (f, note) = truncate_symmetric(symmetric_factor(&x, &cfg)?, args.rank, &cfg)?;
        warnings.extend(note);
        write_named(&args.out, "A.mtx", f.atilde(), &mut outputs)?;
        write_named(&args.out, "S.mtx", f.stilde(), &mut outputs)?;
        (f.rank(), None)
    } else {
        let t = truncated_svd_factor(&x, args.rank, &cfg)?;
        warnings.extend(t.warning.iter().map(|w| w.to_string()));
        write_named(&args.out, "A.mtx", t.pair.a(), &mut outputs)?;
        write_named(&args.out, "B.mtx", t.pair.b(), &mut outputs)?;
        (t.pair.rank(), Some(t.discarded))
    };
    let mut report = RunReport::new(
        "factor",
        Inputs {
            n: x.nrows(),
            r,
            symmetric: args.symmetric,
        },
    );
    report.wall_time_seconds = start.elapsed().as_secs_f64();
    report.factor = Some(FactorReport {
        rank: r,
        discarded_error: discarded,
        outputs,
    });
    report.warnings = warnings;
    Ok(Outcome {
        report,
        status: Status::Ok,
    })
}

/// Parses `"0:2,3:1"` into Jordan blocks `(eigenvalue, size)`.
pub fn parse_blocks(text: &str) -> Result<Vec<(i64, usize)>, CliError> {
    let bad = |part: &str| CliError::Input(format!("invalid Jordan block '{part}', expected eigenvalue:size"));
    text.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|part| {
            let (l, k) = part.split_once(':').ok_or_else(|| bad(part))?;
            let l: i64 = l.trim().parse().map_err(|_| bad(part))?;
            let k: usize = k.trim().parse().map_err(|_| bad(part))?;
            if k == 0 {
                return Err(bad(part));
            }
            Ok((l, k))
        })
        .collect()
}

fn unit(n: usize, i: usize) -> Vec<Complex64> {
    (0..n).map(|k| Complex64::new(if k == i { 1.0 } else { 0.0 }, 0.0)).collect()
}

pub fn fixture(g: &GlobalArgs, args: &FixtureArgs) -> Result<Outcome, CliError> {
    let cfg = g.tolerances()?;
    let mut rng = seeded(g.seed);
    let dir: &PathBuf = &args.out;
    ensure_dir(dir)?;
    let mut outputs = Vec::new();
    let (n, r, symmetric) = match args.kind {
        FixtureKind::E1 => {
            if args.n == 0 {
                return Err(CliError::Input("--n must be positive".into()));
            }
            let a = DenseMatrix::column_vector(&unit(args.n, 0));
            write_named(dir, "A.mtx", &a, &mut outputs)?;
            write_named(dir, "B.mtx", &a.adjoint(), &mut outputs)?;
            (args.n, 1, false)
        }
        FixtureKind::Orthogonal => {
            let a = DenseMatrix::from_real_rows(&[[1.0], [1.0], [0.0]]);
            let b = DenseMatrix::from_real_rows(&[[1.0, -1.0, 0.0]]);
            write_named(dir, "A.mtx", &a, &mut outputs)?;
            write_named(dir, "B.mtx", &b, &mut outputs)?;
            (3, 1, false)
        }
        FixtureKind::Chain => {
            let a = DenseMatrix::from_columns(4, &[unit(4, 0), unit(4, 1)]);
            let b = DenseMatrix::from_real_rows(&[[0.0, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0]]);
            write_named(dir, "A.mtx", &a, &mut outputs)?;
            write_named(dir, "B.mtx", &b, &mut outputs)?;
            (4, 2, false)
        }
        FixtureKind::Random => {
            let (n, r) = (args.n, args.r);
            write_named(dir, "A.mtx", &gaussian(n, r, args.complex, &mut rng), &mut outputs)?;
            write_named(dir, "B.mtx", &gaussian(r, n, args.complex, &mut rng), &mut outputs)?;
            (n, r, false)
        }
        FixtureKind::Lowrank => {
            let (n, r) = (args.n, args.r);
            let x = matmul(&gaussian(n, r, args.complex, &mut rng), &gaussian(r, n, args.complex, &mut rng))?;
            write_named(dir, "X.mtx", &x, &mut outputs)?;
            (n, r, false)
        }
        FixtureKind::Symmetric => {
            let (n, r) = (args.n, args.r);
            let f = loop {
                let a = gaussian(n, r, false, &mut rng);
                let s = random_symmetric(r, &mut rng);
                if let Ok(f) = SymmetricFactorization::new(a, s, &cfg) {
                    break f;
                }
            };
            write_named(dir, "X.mtx", &f.to_dense(), &mut outputs)?;
            write_named(dir, "A.mtx", f.atilde(), &mut outputs)?;
            write_named(dir, "S.mtx", f.stilde(), &mut outputs)?;
            (n, r, true)
        }
        FixtureKind::Jordan => {
            let blocks = parse_blocks(
                args.blocks
                    .as_deref()
                    .ok_or_else(|| CliError::Input("jordan fixtures need --blocks".into()))?,
            )?;
            let f = fixtures::build(args.n, &blocks, true, &mut rng).ok_or_else(|| {
                CliError::Input(format!(
                    "no full-rank factors of size N = {} for blocks {blocks:?}: zero blocks must not exceed N - r",
                    args.n
                ))
            })?;
            write_named(dir, "A.mtx", f.pair.a(), &mut outputs)?;
            write_named(dir, "B.mtx", f.pair.b(), &mut outputs)?;
            (f.n(), f.r(), false)
        }
    };
    let mut report = RunReport::new("fixture", Inputs { n, r, symmetric });
    report.seed = Some(g.seed);
    report.factor = Some(FactorReport {
        rank: r,
        discarded_error: None,
        outputs,
    });
    Ok(Outcome {
        report,
        status: Status::Ok,
    })
}
