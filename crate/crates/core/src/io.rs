//! Comma-separated matrix files.
//!
//! One matrix row per line, values separated by commas, with an optional
//! single header line starting with `#`. Values are written with Rust's
//! shortest round-trip float formatting, so a write/read cycle is exact.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

pub fn format_matrix(m: &DMatrix<f64>, header: Option<&str>) -> String {
    let mut out = String::new();
    if let Some(h) = header {
        let _ = writeln!(out, "# {h}");
    }
    for row in m.row_iter() {
        let mut first = true;
        for v in row.iter() {
            if !first {
                out.push(',');
            }
            first = false;
            let _ = write!(out, "{v}");
        }
        out.push('\n');
    }
    out
}

pub fn parse_matrix(text: &str, path: &Path) -> Result<DMatrix<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if idx == 0 && line.starts_with('#') {
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|tok| {
                tok.trim().parse::<f64>().map_err(|_| Error::Parse {
                    path: path.to_path_buf(),
                    line: idx + 1,
                    msg: format!("cannot parse {:?} as a number", tok.trim()),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line: idx + 1,
                    msg: format!("expected {} columns, found {}", first.len(), row.len()),
                });
            }
        }
        rows.push(row);
    }
    let ncols = rows.first().map_or(0, Vec::len);
    Ok(DMatrix::from_fn(rows.len(), ncols, |r, c| rows[r][c]))
}

pub fn read_matrix(path: &Path) -> Result<DMatrix<f64>> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_matrix(&text, path)
}

pub fn write_matrix(path: &Path, m: &DMatrix<f64>, header: Option<&str>) -> Result<()> {
    write_text(path, &format_matrix(m, header))
}

/// Writes a vector as a single comma-separated row.
pub fn write_row(path: &Path, v: &[f64], header: Option<&str>) -> Result<()> {
    write_matrix(path, &DMatrix::from_row_slice(1, v.len(), v), header)
}

/// Reads a file holding exactly one row.
pub fn read_row(path: &Path) -> Result<Vec<f64>> {
    let m = read_matrix(path)?;
    if m.nrows() != 1 {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line: 1,
            msg: format!("expected a single row, found {}", m.nrows()),
        });
    }
    Ok(m.iter().copied().collect())
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
