//! Default learning rates, as functions of the horizon.

use alloc::format;

use crate::error::{Error, Result};
use crate::losses::Constants;
use crate::math::{cbrt, ln, powf, sqrt};

fn check_horizon(horizon: usize) -> Result<f64> {
    if horizon < 2 {
        return Err(Error::InvalidParameter(format!(
            "horizon must be at least 2, got {horizon}"
        )));
    }
    Ok(horizon as f64)
}

/// Hedge over `d` experts: `T^{-1/3} ln^{1/3} d`.
pub fn hedge(horizon: usize, experts: usize) -> Result<f64> {
    let t = check_horizon(horizon)?;
    if experts < 2 {
        return Err(Error::InvalidParameter("Hedge needs at least 2 experts".into()));
    }
    Ok(cbrt(ln(experts as f64) / t))
}

/// Continuous Hedge in dimension `d`: `min{1, T^{-1/3} (d ln T)^{1/3}}`.
pub fn continuous_hedge(horizon: usize, dim: usize) -> Result<f64> {
    let t = check_horizon(horizon)?;
    Ok(cbrt(dim as f64 * ln(t) / t).min(1.0))
}

/// `min{ log^{2/5} (C L³)^{-2/5} T^{-2/5}, log^{1/3} (L³ + β L²)^{-1/3} T^{-1/3} }`
fn ftrl(log_term: f64, t: f64, c: Constants) -> Result<f64> {
    let l = c.lipschitz;
    if !(l > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "FTRL learning rate needs a positive Lipschitz constant, got {l}"
        )));
    }
    let smooth = cbrt(log_term / ((l * l * l + c.smoothness * l * l) * t));
    let concordant = if c.self_concordance > 0.0 {
        powf(log_term / (c.self_concordance * l * l * l * t), 0.4)
    } else {
        f64::INFINITY
    };
    Ok(smooth.min(concordant))
}

/// FTRL with the ball barrier, with `ln T` as the log term.
pub fn ftrl_ball(horizon: usize, constants: Constants) -> Result<f64> {
    let t = check_horizon(horizon)?;
    ftrl(ln(t), t, constants)
}

/// FTRL with the simplex entropy, with `ln d` as the log term.
pub fn ftrl_simplex(horizon: usize, experts: usize, constants: Constants) -> Result<f64> {
    let t = check_horizon(horizon)?;
    ftrl(ln(experts as f64), t, constants)
}

/// Optimistic OGD: `T^{-1/2}`.
pub fn oogd(horizon: usize) -> Result<f64> {
    let t = check_horizon(horizon)?;
    Ok(1.0 / sqrt(t))
}
