use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{check_dim, Error, Result};
use crate::math::{norm, sqrt};

const MEMBERSHIP_TOL: f64 = 1e-12;

/// A compact convex decision set.
///
/// Simplex points are full probability vectors of length `dim`.
#[derive(Debug, Clone, PartialEq)]
pub enum Domain {
    Simplex { dim: usize },
    Ball { dim: usize, radius: f64 },
    Interval { lo: f64, hi: f64 },
    Box { dim: usize, lo: f64, hi: f64 },
}

impl Domain {
    pub fn simplex(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidParameter(format!(
                "simplex needs at least 2 vertices, got {dim}"
            )));
        }
        Ok(Domain::Simplex { dim })
    }

    pub fn unit_ball(dim: usize) -> Result<Self> {
        Domain::ball(dim, 1.0)
    }

    pub fn ball(dim: usize, radius: f64) -> Result<Self> {
        if dim == 0 || !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "ball needs dim >= 1 and a positive radius (dim {dim}, radius {radius})"
            )));
        }
        Ok(Domain::Ball { dim, radius })
    }

    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "interval needs lo < hi, got [{lo}, {hi}]"
            )));
        }
        Ok(Domain::Interval { lo, hi })
    }

    pub fn cube(dim: usize, lo: f64, hi: f64) -> Result<Self> {
        if dim == 0 || !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "box needs dim >= 1 and lo < hi (dim {dim}, [{lo}, {hi}])"
            )));
        }
        Ok(Domain::Box { dim, lo, hi })
    }

    pub fn dim(&self) -> usize {
        match self {
            Domain::Simplex { dim } | Domain::Ball { dim, .. } | Domain::Box { dim, .. } => *dim,
            Domain::Interval { .. } => 1,
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        if x.len() != self.dim() || x.iter().any(|v| !v.is_finite()) {
            return false;
        }
        match self {
            Domain::Simplex { .. } => {
                x.iter().all(|v| *v >= -MEMBERSHIP_TOL)
                    && (x.iter().sum::<f64>() - 1.0).abs() <= MEMBERSHIP_TOL
            }
            Domain::Ball { radius, .. } => norm(x) <= radius + MEMBERSHIP_TOL,
            Domain::Interval { lo, hi } | Domain::Box { lo, hi, .. } => x
                .iter()
                .all(|v| *v >= lo - MEMBERSHIP_TOL && *v <= hi + MEMBERSHIP_TOL),
        }
    }

    /// Euclidean projection onto the domain.
    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim(), x.len())?;
        Ok(match self {
            Domain::Simplex { .. } => project_simplex(x),
            Domain::Ball { radius, .. } => {
                let n = norm(x);
                if n <= *radius {
                    x.to_vec()
                } else {
                    x.iter().map(|v| v * radius / n).collect()
                }
            }
            Domain::Interval { lo, hi } | Domain::Box { lo, hi, .. } => {
                x.iter().map(|v| v.clamp(*lo, *hi)).collect()
            }
        })
    }

    /// Largest pairwise Euclidean distance.
    pub fn diameter(&self) -> f64 {
        match self {
            Domain::Simplex { .. } => sqrt(2.0),
            Domain::Ball { radius, .. } => 2.0 * radius,
            Domain::Interval { lo, hi } => hi - lo,
            Domain::Box { dim, lo, hi } => (hi - lo) * sqrt(*dim as f64),
        }
    }

    /// Largest Euclidean norm of a point in the domain.
    pub fn max_norm(&self) -> f64 {
        match self {
            Domain::Simplex { .. } => 1.0,
            Domain::Ball { radius, .. } => *radius,
            Domain::Interval { lo, hi } => lo.abs().max(hi.abs()),
            Domain::Box { dim, lo, hi } => lo.abs().max(hi.abs()) * sqrt(*dim as f64),
        }
    }

    pub fn center(&self) -> Vec<f64> {
        match self {
            Domain::Simplex { dim } => vec![1.0 / *dim as f64; *dim],
            Domain::Ball { dim, .. } => vec![0.0; *dim],
            Domain::Interval { lo, hi } => vec![0.5 * (lo + hi)],
            Domain::Box { dim, lo, hi } => vec![0.5 * (lo + hi); *dim],
        }
    }

    /// Extreme points of polytopal domains (`None` for the ball).
    pub fn vertices(&self) -> Option<Vec<Vec<f64>>> {
        match self {
            Domain::Simplex { dim } => Some(
                (0..*dim)
                    .map(|i| {
                        let mut v = vec![0.0; *dim];
                        v[i] = 1.0;
                        v
                    })
                    .collect(),
            ),
            Domain::Ball { .. } => None,
            Domain::Interval { lo, hi } => Some(vec![vec![*lo], vec![*hi]]),
            Domain::Box { dim, lo, hi } => {
                if *dim > 20 {
                    return None;
                }
                Some(
                    (0..(1usize << dim))
                        .map(|mask| {
                            (0..*dim)
                                .map(|i| if mask >> i & 1 == 1 { *hi } else { *lo })
                                .collect()
                        })
                        .collect(),
                )
            }
        }
    }
}

/// Euclidean projection onto the probability simplex (sort-and-threshold).
pub fn project_simplex(v: &[f64]) -> Vec<f64> {
    let n = v.len();
    if n == 0 {
        return Vec::new();
    }
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap_or(core::cmp::Ordering::Equal));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (i, u) in sorted.iter().enumerate() {
        cumsum += u;
        let t = (cumsum - 1.0) / (i + 1) as f64;
        if u - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|x| (x - theta).max(0.0)).collect()
}

/// `(1 - eps) u + eps anchor`, used to pull a comparator off the boundary.
pub fn shrink_comparator(u: &[f64], anchor: &[f64], eps: f64) -> Result<Vec<f64>> {
    check_dim(u.len(), anchor.len())?;
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "shrink factor must lie in (0, 1], got {eps}"
        )));
    }
    Ok(u.iter()
        .zip(anchor)
        .map(|(a, b)| (1.0 - eps) * a + eps * b)
        .collect())
}

/// Drops the last coordinate of a probability vector.
pub fn simplex_to_embedded(p: &[f64]) -> Vec<f64> {
    p[..p.len().saturating_sub(1)].to_vec()
}

/// Appends `1 - Σ x_i` to an embedded simplex point.
pub fn embedded_to_simplex(x: &[f64]) -> Vec<f64> {
    let mut p = x.to_vec();
    p.push(1.0 - x.iter().sum::<f64>());
    p
}
