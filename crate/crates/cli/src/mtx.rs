//! Matrix Market reader and writer.
//!
//! Reads `array` and `coordinate` files with `real`, `integer`, `complex` or
//! `pattern` fields and `general`, `symmetric`, `hermitian` or
//! `skew-symmetric` qualifiers, expanding the stored triangle on read.
//! Writes dense `array` files in general form, real when every imaginary
//! part is zero. Values are written in shortest round-trip form, so a
//! write followed by a read reproduces every bit.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use lowrank_core::{Complex64, DenseMatrix};

#[derive(Debug, thiserror::Error)]
pub enum MtxError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse { path: String, line: usize, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Layout {
    Array,
    Coordinate,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Field {
    Real,
    Integer,
    Complex,
    Pattern,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Symmetry {
    General,
    Symmetric,
    Hermitian,
    Skew,
}

struct Parser<'a> {
    path: &'a str,
    lines: std::iter::Enumerate<std::str::Lines<'a>>,
    line: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, line: usize, message: impl Into<String>) -> MtxError {
        MtxError::Parse {
            path: self.path.to_string(),
            line,
            message: message.into(),
        }
    }

    /// Next line that is neither blank nor a comment.
    fn next_data(&mut self) -> Option<(usize, &'a str)> {
        for (i, l) in self.lines.by_ref() {
            self.line = i + 1;
            let t = l.trim();
            if !t.is_empty() && !t.starts_with('%') {
                return Some((i + 1, t));
            }
        }
        None
    }

    fn expect_data(&mut self, what: &str) -> Result<(usize, &'a str), MtxError> {
        let line = self.line + 1;
        self.next_data()
            .ok_or_else(|| self.err(line, format!("unexpected end of file, expected {what}")))
    }
}

fn parse_usize(p: &Parser, line: usize, tok: &str, what: &str) -> Result<usize, MtxError> {
    tok.parse()
        .map_err(|_| p.err(line, format!("invalid {what} '{tok}'")))
}

fn parse_f64(p: &Parser, line: usize, tok: &str) -> Result<f64, MtxError> {
    let v: f64 = tok
        .parse()
        .map_err(|_| p.err(line, format!("invalid number '{tok}'")))?;
    if !v.is_finite() {
        return Err(p.err(line, format!("non-finite value '{tok}'")));
    }
    Ok(v)
}

fn parse_value(p: &Parser, line: usize, toks: &[&str], field: Field) -> Result<Complex64, MtxError> {
    let want = match field {
        Field::Complex => 2,
        Field::Pattern => 0,
        _ => 1,
    };
    if toks.len() != want {
        return Err(p.err(line, format!("expected {want} value field(s), found {}", toks.len())));
    }
    Ok(match field {
        Field::Pattern => Complex64::new(1.0, 0.0),
        Field::Complex => Complex64::new(parse_f64(p, line, toks[0])?, parse_f64(p, line, toks[1])?),
        Field::Integer => {
            let v: i64 = toks[0]
                .parse()
                .map_err(|_| p.err(line, format!("invalid integer '{}'", toks[0])))?;
            Complex64::new(v as f64, 0.0)
        }
        Field::Real => Complex64::new(parse_f64(p, line, toks[0])?, 0.0),
    })
}

/// Parses Matrix Market text; `path` only labels diagnostics.
pub fn parse_matrix_market(text: &str, path: &str) -> Result<DenseMatrix, MtxError> {
    let mut p = Parser {
        path,
        lines: text.lines().enumerate(),
        line: 0,
    };
    let header = match p.lines.next() {
        Some((_, h)) => h,
        None => return Err(p.err(1, "empty file")),
    };
    p.line = 1;
    let words: Vec<String> = header.split_whitespace().map(str::to_ascii_lowercase).collect();
    if words.len() != 5 || words[0] != "%%matrixmarket" || words[1] != "matrix" {
        return Err(p.err(1, "expected header '%%MatrixMarket matrix <format> <field> <symmetry>'"));
    }
    let layout = match words[2].as_str() {
        "array" => Layout::Array,
        "coordinate" => Layout::Coordinate,
        other => return Err(p.err(1, format!("unsupported format '{other}'"))),
    };
    let field = match words[3].as_str() {
        "real" | "double" => Field::Real,
        "integer" => Field::Integer,
        "complex" => Field::Complex,
        "pattern" => Field::Pattern,
        other => return Err(p.err(1, format!("unsupported field '{other}'"))),
    };
    let symmetry = match words[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "hermitian" => Symmetry::Hermitian,
        "skew-symmetric" => Symmetry::Skew,
        other => return Err(p.err(1, format!("unsupported symmetry '{other}'"))),
    };
    if layout == Layout::Array && field == Field::Pattern {
        return Err(p.err(1, "pattern field requires coordinate format"));
    }
    if symmetry == Symmetry::Hermitian && field != Field::Complex {
        return Err(p.err(1, "hermitian qualifier requires complex field"));
    }

    let (size_line, size) = p.expect_data("size line")?;
    let dims: Vec<&str> = size.split_whitespace().collect();
    let want = if layout == Layout::Array { 2 } else { 3 };
    if dims.len() != want {
        return Err(p.err(size_line, format!("size line needs {want} integers")));
    }
    let nrows = parse_usize(&p, size_line, dims[0], "row count")?;
    let ncols = parse_usize(&p, size_line, dims[1], "column count")?;
    if symmetry != Symmetry::General && nrows != ncols {
        return Err(p.err(size_line, "symmetric qualifiers require a square matrix"));
    }

    let mut m = DenseMatrix::zeros(nrows, ncols);
    let place = |m: &mut DenseMatrix, i: usize, j: usize, v: Complex64| {
        m[(i, j)] = v;
        if i != j {
            match symmetry {
                Symmetry::General => {}
                Symmetry::Symmetric => m[(j, i)] = v,
                Symmetry::Hermitian => m[(j, i)] = v.conj(),
                Symmetry::Skew => m[(j, i)] = -v,
            }
        }
    };

    match layout {
        Layout::Array => {
            let slots: Vec<(usize, usize)> = (0..ncols)
                .flat_map(|j| {
                    let start = match symmetry {
                        Symmetry::General => 0,
                        Symmetry::Skew => j + 1,
                        _ => j,
                    };
                    (start..nrows).map(move |i| (i, j))
                })
                .collect();
            for &(i, j) in &slots {
                let (line, text) = p.expect_data(&format!("entry ({}, {})", i + 1, j + 1))?;
                let toks: Vec<&str> = text.split_whitespace().collect();
                let v = parse_value(&p, line, &toks, field)?;
                if symmetry == Symmetry::Hermitian && i == j && v.im != 0.0 {
                    return Err(p.err(line, "hermitian diagonal entry must be real"));
                }
                place(&mut m, i, j, v);
            }
        }
        Layout::Coordinate => {
            let nnz = parse_usize(&p, size_line, dims[2], "entry count")?;
            for _ in 0..nnz {
                let (line, text) = p.expect_data("coordinate entry")?;
                let toks: Vec<&str> = text.split_whitespace().collect();
                if toks.len() < 2 {
                    return Err(p.err(line, "coordinate entry needs row and column indices"));
                }
                let i = parse_usize(&p, line, toks[0], "row index")?;
                let j = parse_usize(&p, line, toks[1], "column index")?;
                if i == 0 || j == 0 || i > nrows || j > ncols {
                    return Err(p.err(line, format!("index ({i}, {j}) outside {nrows}x{ncols}")));
                }
                if symmetry != Symmetry::General && i < j {
                    return Err(p.err(line, format!("entry ({i}, {j}) above the diagonal in a symmetric file")));
                }
                if symmetry == Symmetry::Skew && i == j {
                    return Err(p.err(line, "skew-symmetric file stores a diagonal entry"));
                }
                let v = parse_value(&p, line, &toks[2..], field)?;
                place(&mut m, i - 1, j - 1, v);
            }
        }
    }
    if let Some((line, _)) = p.next_data() {
        return Err(p.err(line, "unexpected data after the last entry"));
    }
    Ok(m)
}

pub fn read_matrix_market(path: &Path) -> Result<DenseMatrix, MtxError> {
    let label = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|source| MtxError::Io {
        path: label.clone(),
        source,
    })?;
    parse_matrix_market(&text, &label)
}

/// Dense `array` text, column-major, one entry per line.
pub fn format_matrix_market(m: &DenseMatrix) -> String {
    let complex = !m.is_real();
    let mut out = String::new();
    let field = if complex { "complex" } else { "real" };
    let _ = writeln!(out, "%%MatrixMarket matrix array {field} general");
    let _ = writeln!(out, "{} {}", m.nrows(), m.ncols());
    for z in m.as_slice() {
        if complex {
            let _ = writeln!(out, "{:e} {:e}", z.re, z.im);
        } else {
            let _ = writeln!(out, "{:e}", z.re);
        }
    }
    out
}

pub fn write_matrix_market(m: &DenseMatrix, path: &Path) -> Result<(), MtxError> {
    fs::write(path, format_matrix_market(m)).map_err(|source| MtxError::Io {
        path: path.display().to_string(),
        source,
    })
}
