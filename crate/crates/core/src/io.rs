//! JSON model files and reduction metadata sidecars.
//!
//! A model file is a single JSON object:
//!
//! ```json
//! {
//!   "n_x": 2, "n_u": 1, "n_y": 1, "n_p": 1,
//!   "A": [[[0.0, 1.0], [0.0, 0.0]], [[0.0, 0.0], [0.5, 0.0]]],
//!   "B": [[[0.0], [1.0]], [[0.0], [0.0]]],
//!   "C": [[[1.0, 0.0]], [[1.0, 0.0]]]
//! }
//! ```
//!
//! Each coefficient family lists `n_p + 1` matrices (constant term first) as
//! row-major nested arrays. Unknown fields are rejected rather than ignored,
//! and loading always validates: dimensions, list lengths, and finiteness.

use std::fs;
use std::io::Write;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, MatrixFamily, Result, ValidationIssue, ValidationReport};
use crate::model::LpvSsModel;
use crate::reduce::ReductionResult;

/// The on-disk form of a model, before validation.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawModel {
    pub n_x: usize,
    pub n_u: usize,
    pub n_y: usize,
    pub n_p: usize,
    #[serde(rename = "A")]
    pub a: Vec<Vec<Vec<f64>>>,
    #[serde(rename = "B")]
    pub b: Vec<Vec<Vec<f64>>>,
    #[serde(rename = "C")]
    pub c: Vec<Vec<Vec<f64>>>,
}

/// Parse one nested array into a matrix of the expected shape, or record why
/// it cannot be.
fn matrix_from_rows(
    report: &mut ValidationReport,
    family: MatrixFamily,
    index: usize,
    rows: &[Vec<f64>],
    expected: (usize, usize),
) -> Option<DMatrix<f64>> {
    let shape_ok =
        rows.len() == expected.0 && rows.iter().all(|r| r.len() == expected.1);
    if !shape_ok {
        let got_cols = rows
            .iter()
            .map(Vec::len)
            .find(|&l| l != expected.1)
            .unwrap_or(expected.1);
        report.push(ValidationIssue::DimensionMismatch {
            family,
            index,
            expected,
            got: (rows.len(), got_cols),
        });
        return None;
    }
    Some(DMatrix::from_fn(expected.0, expected.1, |r, c| rows[r][c]))
}

fn family_from_raw(
    report: &mut ValidationReport,
    family: MatrixFamily,
    raw: &[Vec<Vec<f64>>],
    n_p: usize,
    expected: (usize, usize),
) -> Vec<DMatrix<f64>> {
    if raw.len() != n_p + 1 {
        report.push(ValidationIssue::MatrixListLength {
            family,
            expected: n_p + 1,
            got: raw.len(),
        });
    }
    raw.iter()
        .enumerate()
        .filter_map(|(index, rows)| matrix_from_rows(report, family, index, rows, expected))
        .collect()
}

impl RawModel {
    /// Validate and assemble. Collects every defect: list lengths, per-matrix
    /// shapes, and non-finite entries are all reported at once.
    pub fn validate(&self) -> std::result::Result<LpvSsModel, ValidationReport> {
        let mut report = ValidationReport::default();
        for (name, value) in [("n_u", self.n_u), ("n_y", self.n_y), ("n_p", self.n_p)] {
            if value == 0 {
                report.push(ValidationIssue::ZeroDimension { name });
            }
        }
        if !report.is_empty() {
            return Err(report);
        }
        let a = family_from_raw(&mut report, MatrixFamily::A, &self.a, self.n_p, (self.n_x, self.n_x));
        let b = family_from_raw(&mut report, MatrixFamily::B, &self.b, self.n_p, (self.n_x, self.n_u));
        let c = family_from_raw(&mut report, MatrixFamily::C, &self.c, self.n_p, (self.n_y, self.n_x));
        if !report.is_empty() {
            return Err(report);
        }
        // Shapes are in order; delegate the rest (finiteness) to the model
        // constructor so programmatic and file-based construction agree.
        LpvSsModel::new(self.n_x, self.n_u, self.n_y, self.n_p, a, b, c)
    }

    pub fn from_model(model: &LpvSsModel) -> Self {
        RawModel {
            n_x: model.n_x(),
            n_u: model.n_u(),
            n_y: model.n_y(),
            n_p: model.n_p(),
            a: model.a().iter().map(matrix_to_rows).collect(),
            b: model.b().iter().map(matrix_to_rows).collect(),
            c: model.c().iter().map(matrix_to_rows).collect(),
        }
    }
}

/// Row-major nested array form of a matrix.
pub fn matrix_to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| m[(r, c)]).collect())
        .collect()
}

/// Load and validate a model file.
pub fn load_model(path: impl AsRef<Path>) -> Result<LpvSsModel> {
    let text = fs::read_to_string(&path)?;
    let raw: RawModel = serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
    raw.validate().map_err(Error::InvalidModel)
}

/// Write a model file (pretty-printed, trailing newline).
pub fn save_model(path: impl AsRef<Path>, model: &LpvSsModel) -> Result<()> {
    let raw = RawModel::from_model(model);
    let mut text = serde_json::to_string_pretty(&raw).map_err(|e| Error::Parse(e.to_string()))?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Everything about a reduction worth keeping next to the reduced model:
/// the projection parameters, the achieved order and guarantee, conditioning
/// diagnostics, and the bases themselves.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReductionMeta {
    pub mode: String,
    pub depth: usize,
    pub original_order: usize,
    pub order: usize,
    pub matched_depth: usize,
    pub tol: f64,
    pub wv_condition: Option<f64>,
    pub warnings: Vec<String>,
    pub v: Option<Vec<Vec<f64>>>,
    pub w: Option<Vec<Vec<f64>>>,
}

impl ReductionMeta {
    pub fn from_result(original_order: usize, result: &ReductionResult) -> Self {
        ReductionMeta {
            mode: result.mode.to_string(),
            depth: result.depth,
            original_order,
            order: result.order,
            matched_depth: result.matched_depth,
            tol: result.tol,
            wv_condition: result.wv_condition,
            warnings: result.warnings.clone(),
            v: result.v.as_ref().map(matrix_to_rows),
            w: result.w.as_ref().map(matrix_to_rows),
        }
    }
}

/// Write a reduction metadata sidecar (pretty-printed JSON).
pub fn save_reduction_meta(path: impl AsRef<Path>, meta: &ReductionMeta) -> Result<()> {
    let mut text = serde_json::to_string_pretty(meta).map_err(|e| Error::Parse(e.to_string()))?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Plain text matrix dump: one row per line, entries separated by single
/// spaces, shortest round-tripping decimal form.
pub fn write_matrix_text(mut out: impl Write, m: &DMatrix<f64>) -> std::io::Result<()> {
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            if c > 0 {
                write!(out, " ")?;
            }
            write!(out, "{}", m[(r, c)])?;
        }
        writeln!(out)?;
    }
    Ok(())
}
