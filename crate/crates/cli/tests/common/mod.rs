#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use lowrank_cli::RunReport;

pub fn lowrank(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lowrank"))
        .args(args)
        .output()
        .expect("binary runs")
}

/// Runs a subcommand with `--json -` and parses the report.
pub fn report(args: &[&str]) -> (RunReport, i32) {
    let mut full = args.to_vec();
    full.extend(["--json", "-"]);
    let out = lowrank(&full);
    let text = String::from_utf8(out.stdout).unwrap();
    let r = RunReport::from_json(&text).unwrap_or_else(|e| panic!("{e}: {text}"));
    (r, out.status.code().unwrap())
}

pub fn fixture(kind: &str, dir: &Path, extra: &[&str]) -> PathBuf {
    let out = dir.join(kind);
    let mut args = vec!["fixture", kind, "--out", out.to_str().unwrap()];
    args.extend(extra);
    let o = lowrank(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    out
}

pub fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

pub fn golden_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(format!("{name}.json"))
}

/// Compares a report with `tests/golden/<name>.json`, ignoring wall time.
/// With `UPDATE_GOLDEN=1` the file is rewritten first.
pub fn check_golden(name: &str, mut r: RunReport) -> Result<(), String> {
    r.wall_time_seconds = 0.0;
    let path = golden_path(name);
    let text = r.to_json() + "\n";
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        fs::write(&path, &text).map_err(|e| e.to_string())?;
    }
    let want = fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    if want != text {
        return Err(format!("golden {name} differs:\n{text}"));
    }
    Ok(())
}

/// Golden reports: `(name, fixture kind, fixture flags, subcommand)`.
pub const GOLDEN_CASES: &[(&str, &str, &[&str], &str)] = &[
    ("e1_eig", "e1", &["--n", "3"], "eig"),
    ("orthogonal_jordan", "orthogonal", &[], "jordan"),
    ("chain_jordan", "chain", &[], "jordan"),
    ("integer_jordan", "jordan", &["--n", "7", "--blocks", "0:2,0:1,3:2"], "jordan"),
];

/// Builds the fixture for a golden case and runs its subcommand on it.
pub fn run_golden_case(dir: &Path, kind: &str, flags: &[&str], sub: &str) -> (RunReport, i32) {
    let f = fixture(kind, dir, flags);
    let (a, b) = (f.join("A.mtx"), f.join("B.mtx"));
    let mut args = vec![sub, "--a", s(&a), "--b", s(&b)];
    if sub == "eig" {
        args.extend(["--vectors", "--oracle"]);
    }
    report(&args)
}

/// Runs `fixture <kind>` twice with the same seed and once with another;
/// returns an error unless the first two agree byte for byte and the seed
/// matters for random kinds.
pub fn check_fixture_seed(dir: &Path, kind: &str) -> Result<(), String> {
    let mut extra = vec!["--n", "9", "--r", "3", "--seed", "41"];
    if kind == "jordan" {
        extra.extend(["--blocks", "0:2,1:2"]);
    }
    let one = fixture(kind, &dir.join("one"), &extra);
    let two = fixture(kind, &dir.join("two"), &extra);
    extra[5] = "42";
    let other = fixture(kind, &dir.join("other"), &extra);
    let mut names: Vec<_> = fs::read_dir(&one).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    if names.is_empty() {
        return Err(format!("{kind}: no files written"));
    }
    let mut seed_matters = false;
    for name in &names {
        let first = fs::read(one.join(name)).unwrap();
        if first != fs::read(two.join(name)).unwrap() {
            return Err(format!("{kind}/{}: differs under the same seed", name.to_string_lossy()));
        }
        seed_matters |= first != fs::read(other.join(name)).unwrap_or_default();
    }
    if !seed_matters {
        return Err(format!("{kind}: output ignores --seed"));
    }
    Ok(())
}

pub const SEEDED_FIXTURES: &[&str] = &["random", "lowrank", "symmetric", "jordan"];
