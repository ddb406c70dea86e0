//! CSV matrices, value columns and trace files.
//!
//! Matrices are written one row per line, comma separated, no header. Values
//! use the shortest representation that parses back to the same `f64`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use blockra_core::RearrangementMatrix;

/// Parses comma-separated rows. Blank lines are skipped.
pub fn parse_rows(text: &str) -> Result<Vec<Vec<f64>>> {
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|cell| {
                cell.trim()
                    .parse::<f64>()
                    .with_context(|| format!("line {}: bad number {cell:?}", lineno + 1))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok(rows)
}

/// Parses a matrix from CSV text.
pub fn parse_matrix(text: &str) -> Result<RearrangementMatrix> {
    let rows = parse_rows(text)?;
    Ok(RearrangementMatrix::from_rows(&rows)?)
}

/// Renders a matrix as CSV text.
pub fn format_matrix(x: &RearrangementMatrix) -> String {
    let mut out = String::new();
    for i in 0..x.m() {
        for j in 0..x.n() {
            if j > 0 {
                out.push(',');
            }
            write!(out, "{}", x.get(i, j)).unwrap();
        }
        out.push('\n');
    }
    out
}

/// Reads a matrix CSV file.
pub fn read_matrix(path: &Path) -> Result<RearrangementMatrix> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_matrix(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Writes a matrix CSV file.
pub fn write_matrix(path: &Path, x: &RearrangementMatrix) -> Result<()> {
    fs::write(path, format_matrix(x)).with_context(|| format!("writing {}", path.display()))
}

/// Reads a single column of values: the first field of every line.
pub fn read_values(path: &Path) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let rows = parse_rows(&text).with_context(|| format!("parsing {}", path.display()))?;
    if rows.is_empty() {
        bail!("{} holds no values", path.display());
    }
    Ok(rows.into_iter().map(|r| r[0]).collect())
}

/// Writes an MCMC trace with header `iter,objective,accepted`.
pub fn write_trace(path: &Path, objective: &[f64], accepted: &[bool]) -> Result<()> {
    let mut out = String::from("iter,objective,accepted\n");
    for (i, (f, a)) in objective.iter().zip(accepted).enumerate() {
        writeln!(out, "{},{},{}", i + 1, f, u8::from(*a)).unwrap();
    }
    fs::write(path, out).with_context(|| format!("writing {}", path.display()))
}
