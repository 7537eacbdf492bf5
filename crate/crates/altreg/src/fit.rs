//! Power-law fits on log-log scale.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};
use crate::trace::fmt_float;

pub const MIN_POINTS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatePoint {
    #[serde(rename = "T")]
    pub horizon: usize,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Fit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub used: usize,
    /// Points dropped for a nonpositive or non-finite value.
    pub excluded: usize,
}

/// Least squares of `ln value` on `ln T`.
pub fn fit_rate(points: &[RatePoint]) -> Result<Fit> {
    let valid: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.value > 0.0 && p.value.is_finite() && p.horizon > 0)
        .map(|p| ((p.horizon as f64).ln(), p.value.ln()))
        .collect();
    let excluded = points.len() - valid.len();
    if excluded > 0 {
        log::warn!("excluded {excluded} rate points with nonpositive values");
    }
    if valid.len() < MIN_POINTS {
        return Err(HarnessError::Check(format!(
            "need at least {MIN_POINTS} positive rate points, got {}",
            valid.len()
        )));
    }
    let n = valid.len() as f64;
    let mx = valid.iter().map(|p| p.0).sum::<f64>() / n;
    let my = valid.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = valid.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = valid.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = valid.iter().map(|p| (p.1 - my).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(HarnessError::Check("rate points need at least two distinct horizons".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = valid.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let r2 = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    Ok(Fit {
        slope,
        intercept,
        r2,
        used: valid.len(),
        excluded,
    })
}

pub fn write_rates(path: &Path, points: &[RatePoint]) -> Result<()> {
    let file = File::create(path).map_err(|e| HarnessError::io(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record(["T", "value"])?;
    for p in points {
        w.write_record([p.horizon.to_string(), fmt_float(p.value)])?;
    }
    w.flush().map_err(|e| HarnessError::io(path, e))
}

/// Reads a `T,value` CSV as written by [`write_rates`].
pub fn read_rates(path: &Path) -> Result<Vec<RatePoint>> {
    let file = File::open(path).map_err(|e| HarnessError::io(path, e))?;
    let mut r = csv::Reader::from_reader(file);
    let mut out = Vec::new();
    for (i, row) in r.deserialize::<RatePoint>().enumerate() {
        out.push(row.map_err(|e| HarnessError::validation(format!("{}:row {}", path.display(), i + 1), e.to_string()))?);
    }
    Ok(out)
}

pub fn print_fit<W: Write>(mut out: W, fit: &Fit) -> std::io::Result<()> {
    writeln!(
        out,
        "slope {:.4}  intercept {:.4}  r2 {:.4}  points {} (excluded {})",
        fit.slope, fit.intercept, fit.r2, fit.used, fit.excluded
    )
}
