//! Best fit rate: the normalized output-error score used to compare a reduced
//! model's simulated response against the original's.

use nalgebra::DVector;

use lpvred_core::{Error, Result};

/// Best fit rate of an approximation `ybar` against a reference `y`, in
/// percent:
///
/// ```text
/// BFR = 100 * max(1 - sqrt(sum_t ||y(t) - ybar(t)||^2)
///                   / sqrt(sum_t ||y(t) - y_m||^2), 0)
/// ```
///
/// where `y_m` is the time average of `y`. 100 means a perfect match, 0 means
/// no better than predicting the constant mean, and the clamp maps anything
/// worse to 0 as well. The degenerate zero-denominator case (constant
/// reference) scores 100 when the residual is also zero and 0 otherwise.
pub fn bfr(y: &[DVector<f64>], ybar: &[DVector<f64>]) -> Result<f64> {
    if y.len() != ybar.len() {
        return Err(Error::DimensionMismatch(format!(
            "sequence lengths differ: {} vs {}",
            y.len(),
            ybar.len()
        )));
    }
    if y.is_empty() {
        return Err(Error::DimensionMismatch(
            "best fit rate of empty sequences".into(),
        ));
    }
    let dim = y[0].len();
    if let Some(bad) = y.iter().chain(ybar.iter()).find(|v| v.len() != dim) {
        return Err(Error::DimensionMismatch(format!(
            "output dimensions differ: {} vs {}",
            dim,
            bad.len()
        )));
    }
    let mut mean = DVector::zeros(dim);
    for v in y {
        mean += v;
    }
    mean /= y.len() as f64;
    let residual: f64 = y
        .iter()
        .zip(ybar)
        .map(|(a, b)| (a - b).norm_squared())
        .sum::<f64>()
        .sqrt();
    let deviation: f64 = y
        .iter()
        .map(|a| (a - &mean).norm_squared())
        .sum::<f64>()
        .sqrt();
    if deviation == 0.0 {
        return Ok(if residual == 0.0 { 100.0 } else { 0.0 });
    }
    Ok(100.0 * (1.0 - residual / deviation).max(0.0))
}

/// Per-trial best fit rates with their aggregates.
#[derive(Debug, Clone, PartialEq)]
pub struct BfrStats {
    /// One value per trial, in trial order.
    pub values: Vec<f64>,
    pub mean: f64,
    pub best: f64,
    pub worst: f64,
}

impl BfrStats {
    /// Aggregate per-trial values; `None` for an empty set.
    pub fn from_values(values: Vec<f64>) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let best = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let worst = values.iter().cloned().fold(f64::INFINITY, f64::min);
        Some(BfrStats {
            values,
            mean,
            best,
            worst,
        })
    }
}
