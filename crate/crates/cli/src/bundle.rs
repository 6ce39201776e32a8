//! Problem bundles: a JSON manifest with keys {lambda, Y, D, X_true?, seed}
//! where each matrix is either a path to a CSV file (resolved relative to
//! the manifest) or an inline array of rows.

use std::fs;
use std::path::Path;

use rankprox_core::{Matrix, Problem};
use serde::{Deserialize, Serialize};

use crate::csvio;
use crate::error::CliError;

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixRef {
    Path(String),
    Inline(Vec<Vec<f64>>),
}

#[derive(Serialize, Deserialize)]
pub struct Manifest {
    pub lambda: f64,
    #[serde(rename = "Y")]
    pub y: MatrixRef,
    #[serde(rename = "D")]
    pub d: MatrixRef,
    #[serde(rename = "X_true", skip_serializing_if = "Option::is_none")]
    pub x_true: Option<MatrixRef>,
    pub seed: u64,
}

#[derive(Debug)]
pub struct ProblemBundle {
    pub problem: Problem,
    pub x_true: Option<Matrix>,
    pub seed: u64,
}

fn resolve(r: &MatrixRef, base: &Path, manifest: &Path) -> Result<Matrix, CliError> {
    match r {
        MatrixRef::Path(rel) => csvio::read_matrix(&base.join(rel)),
        MatrixRef::Inline(rows) => Matrix::from_rows(rows).map_err(|e| {
            CliError::parse(manifest, format!("inline matrix: {e}"))
        }),
    }
}

pub fn load_bundle(manifest_path: &Path) -> Result<ProblemBundle, CliError> {
    let text = fs::read_to_string(manifest_path).map_err(|e| CliError::io(manifest_path, e))?;
    let manifest: Manifest =
        serde_json::from_str(&text).map_err(|e| CliError::parse(manifest_path, e.to_string()))?;
    let base = manifest_path.parent().unwrap_or(Path::new(".")).to_path_buf();
    let y = resolve(&manifest.y, &base, manifest_path)?;
    let d = resolve(&manifest.d, &base, manifest_path)?;
    let x_true = manifest
        .x_true
        .as_ref()
        .map(|r| resolve(r, &base, manifest_path))
        .transpose()?;
    let problem = Problem::new(y, d, manifest.lambda)?;
    Ok(ProblemBundle { problem, x_true, seed: manifest.seed })
}

/// Writes the manifest plus one CSV per matrix next to it, named after the
/// manifest stem.
pub fn save_bundle(
    manifest_path: &Path,
    lambda: f64,
    y: &Matrix,
    d: &Matrix,
    x_true: Option<&Matrix>,
    seed: u64,
) -> Result<(), CliError> {
    let dir = manifest_path.parent().unwrap_or(Path::new("."));
    if !dir.as_os_str().is_empty() {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    let stem = manifest_path
        .file_stem()
        .and_then(|s| s.to_str())
        .ok_or_else(|| CliError::Invalid(format!("bad manifest path {}", manifest_path.display())))?
        .to_string();
    let csv_name = |part: &str| format!("{stem}.{part}.csv");
    csvio::write_matrix(&dir.join(csv_name("y")), y)?;
    csvio::write_matrix(&dir.join(csv_name("d")), d)?;
    let x_true_ref = match x_true {
        Some(m) => {
            csvio::write_matrix(&dir.join(csv_name("x_true")), m)?;
            Some(MatrixRef::Path(csv_name("x_true")))
        }
        None => None,
    };
    let manifest = Manifest {
        lambda,
        y: MatrixRef::Path(csv_name("y")),
        d: MatrixRef::Path(csv_name("d")),
        x_true: x_true_ref,
        seed,
    };
    let mut text = serde_json::to_string_pretty(&manifest)
        .map_err(|e| CliError::Invalid(format!("manifest serialization: {e}")))?;
    text.push('\n');
    fs::write(manifest_path, text).map_err(|e| CliError::io(manifest_path, e))
}
