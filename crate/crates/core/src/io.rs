//! Matrix file parsing: CSV (one row per line) and JSON (2-D array).

use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::PositiveMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MatrixFormat {
    /// Decide from the file extension, or from the leading character for
    /// in-memory text ('[' means JSON).
    #[default]
    Auto,
    Csv,
    Json,
}

fn finish(mut rows: Vec<Vec<f64>>, abs: bool) -> Result<PositiveMatrix> {
    if abs {
        for row in rows.iter_mut() {
            for v in row.iter_mut() {
                *v = v.abs();
            }
        }
    }
    PositiveMatrix::from_rows(&rows)
}

fn parse_csv(text: &str, abs: bool) -> Result<PositiveMatrix> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut row = Vec::new();
        for (k, token) in line.split(',').enumerate() {
            let v: f64 = token.trim().parse().map_err(|_| Error::ParseEntry {
                row: i + 1,
                col: k + 1,
                token: token.trim().to_string(),
            })?;
            row.push(v);
        }
        rows.push(row);
    }
    finish(rows, abs)
}

fn parse_json(text: &str, abs: bool) -> Result<PositiveMatrix> {
    let rows: Vec<Vec<f64>> = serde_json::from_str(text)?;
    finish(rows, abs)
}

/// Parses matrix text. Without `abs`, any negative entry is a hard error
/// naming its (1-based) position; with `abs`, entries are replaced by their
/// absolute values before validation.
pub fn parse_matrix_str(text: &str, format: MatrixFormat, abs: bool) -> Result<PositiveMatrix> {
    match format {
        MatrixFormat::Csv => parse_csv(text, abs),
        MatrixFormat::Json => parse_json(text, abs),
        MatrixFormat::Auto => {
            if text.trim_start().starts_with('[') {
                parse_json(text, abs)
            } else {
                parse_csv(text, abs)
            }
        }
    }
}

pub fn parse_matrix_file(path: &Path, format: MatrixFormat, abs: bool) -> Result<PositiveMatrix> {
    let text = std::fs::read_to_string(path)?;
    let format = match format {
        MatrixFormat::Auto => {
            if path
                .extension()
                .is_some_and(|e| e.eq_ignore_ascii_case("json"))
            {
                MatrixFormat::Json
            } else {
                MatrixFormat::Auto
            }
        }
        other => other,
    };
    parse_matrix_str(&text, format, abs)
}
