//! Matrix CSV: comma-separated, no header, one line per matrix row.
//! Values use the shortest decimal representation that round-trips, so
//! write-then-read reproduces every entry bit for bit.

use std::fs;
use std::path::Path;

use rankprox_core::Matrix;

use crate::error::CliError;

pub fn matrix_to_csv(m: &Matrix) -> String {
    let mut out = String::new();
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            if j > 0 {
                out.push(',');
            }
            out.push_str(&m.get(i, j).to_string());
        }
        out.push('\n');
    }
    out
}

pub fn write_matrix(path: &Path, m: &Matrix) -> Result<(), CliError> {
    fs::write(path, matrix_to_csv(m)).map_err(|e| CliError::io(path, e))
}

pub fn parse_matrix(text: &str, origin: &Path) -> Result<Matrix, CliError> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut row = Vec::new();
        for cell in line.split(',') {
            let v: f64 = cell.trim().parse().map_err(|_| {
                CliError::parse(origin, format!("line {}: bad number '{}'", lineno + 1, cell.trim()))
            })?;
            row.push(v);
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(CliError::parse(origin, "empty matrix"));
    }
    Matrix::from_rows(&rows).map_err(CliError::Core)
}

pub fn read_matrix(path: &Path) -> Result<Matrix, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_matrix(&text, path)
}
