use alloc::format;
use alloc::vec::Vec;

use super::divergence::{bregman, ConvexFunction};
use crate::error::{check_dim, Error, Result};
use crate::linalg::SymMatrix;
use crate::math::{distance, exp, ln, ln_1p, norm, norm_sq, sqrt};

/// Points closer than this to the ball's boundary are treated as boundary.
pub const BOUNDARY_TOLERANCE: f64 = 1e-10;

/// Legendre regularizers with closed-form conjugates.
///
/// `SimplexEntropy` works in the `(experts - 1)`-dimensional embedding of the
/// simplex: a point `x` stands for the distribution `(x, 1 - Σ x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Regularizer {
    /// `-ln(1 - ‖x‖²)` on the open unit ball of `R^dim`.
    BallBarrier { dim: usize },
    /// `Σ x_i ln x_i + (1 - Σ x) ln(1 - Σ x)`.
    SimplexEntropy { experts: usize },
}

impl Regularizer {
    pub fn ball_barrier(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("ball barrier needs dim >= 1".into()));
        }
        Ok(Regularizer::BallBarrier { dim })
    }

    pub fn simplex_entropy(experts: usize) -> Result<Self> {
        if experts < 2 {
            return Err(Error::InvalidParameter(
                "simplex entropy needs at least 2 experts".into(),
            ));
        }
        Ok(Regularizer::SimplexEntropy { experts })
    }

    /// Dimension of primal and dual points.
    pub fn primal_dim(&self) -> usize {
        match self {
            Regularizer::BallBarrier { dim } => *dim,
            Regularizer::SimplexEntropy { experts } => experts - 1,
        }
    }

    /// Strong-convexity constant w.r.t. the Euclidean norm.
    pub fn sigma(&self) -> f64 {
        match self {
            Regularizer::BallBarrier { .. } => 2.0,
            Regularizer::SimplexEntropy { .. } => 1.0,
        }
    }

    /// Order-3 smoothness constant of the conjugate.
    pub fn m(&self) -> f64 {
        match self {
            Regularizer::BallBarrier { .. } => 4.0,
            Regularizer::SimplexEntropy { .. } => 8.0,
        }
    }

    /// Self-concordant barrier parameter, where one applies.
    pub fn nu(&self) -> Option<f64> {
        match self {
            Regularizer::BallBarrier { .. } => Some(1.0),
            Regularizer::SimplexEntropy { .. } => None,
        }
    }

    /// Errors unless `x` is strictly inside the domain.
    pub fn check_interior(&self, x: &[f64]) -> Result<()> {
        check_dim(self.primal_dim(), x.len())?;
        match self {
            Regularizer::BallBarrier { .. } => {
                let n = norm(x);
                if !(1.0 - n >= BOUNDARY_TOLERANCE) {
                    return Err(Error::Domain(format!(
                        "ball barrier at distance {:e} from the boundary",
                        1.0 - n
                    )));
                }
            }
            Regularizer::SimplexEntropy { .. } => {
                let last = 1.0 - x.iter().sum::<f64>();
                if x.iter().any(|v| !(*v > 0.0)) || !(last > 0.0) {
                    return Err(Error::Domain(format!(
                        "simplex entropy needs strictly positive coordinates, got {x:?}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn value(&self, x: &[f64]) -> Result<f64> {
        self.check_interior(x)?;
        Ok(match self {
            Regularizer::BallBarrier { .. } => -ln_1p(-norm_sq(x)),
            Regularizer::SimplexEntropy { .. } => {
                let last = 1.0 - x.iter().sum::<f64>();
                x.iter().map(|v| v * ln(*v)).sum::<f64>() + last * ln(last)
            }
        })
    }

    pub fn grad(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_interior(x)?;
        Ok(match self {
            Regularizer::BallBarrier { .. } => {
                let s = 1.0 - norm_sq(x);
                x.iter().map(|v| 2.0 * v / s).collect()
            }
            Regularizer::SimplexEntropy { .. } => {
                let ll = ln(1.0 - x.iter().sum::<f64>());
                x.iter().map(|v| ln(*v) - ll).collect()
            }
        })
    }

    pub fn hessian(&self, x: &[f64]) -> Result<SymMatrix> {
        self.check_interior(x)?;
        Ok(match self {
            Regularizer::BallBarrier { dim } => {
                let s = 1.0 - norm_sq(x);
                let mut h = SymMatrix::outer(x, 4.0 / (s * s));
                h.add_diagonal(2.0 / s);
                debug_assert_eq!(h.dim(), *dim);
                h
            }
            Regularizer::SimplexEntropy { .. } => {
                let last = 1.0 - x.iter().sum::<f64>();
                let n = x.len();
                let mut h = SymMatrix::zeros(n);
                for (i, xi) in x.iter().enumerate() {
                    for j in 0..n {
                        let d = if i == j { 1.0 / xi } else { 0.0 };
                        h.set(i, j, d + 1.0 / last);
                    }
                }
                h
            }
        })
    }

    /// Conjugate value. For the ball barrier this is
    /// `√(1+‖w‖²) - ln(1+√(1+‖w‖²))`, which exceeds the Fenchel conjugate by
    /// the constant `1 - ln 2`; Bregman divergences are unaffected.
    pub fn conj_value(&self, w: &[f64]) -> Result<f64> {
        check_dim(self.primal_dim(), w.len())?;
        Ok(match self {
            Regularizer::BallBarrier { .. } => {
                let q = sqrt(1.0 + norm_sq(w));
                q - ln(1.0 + q)
            }
            Regularizer::SimplexEntropy { .. } => log1p_sum_exp(w),
        })
    }

    /// `∇ψ*(w)`, the primal point whose gradient is `w`.
    pub fn conj_grad(&self, w: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.primal_dim(), w.len())?;
        Ok(match self {
            Regularizer::BallBarrier { .. } => {
                let q = sqrt(1.0 + norm_sq(w));
                w.iter().map(|v| v / (1.0 + q)).collect()
            }
            Regularizer::SimplexEntropy { .. } => implicit_softmax(w),
        })
    }

    pub fn conj_hessian(&self, w: &[f64]) -> Result<SymMatrix> {
        check_dim(self.primal_dim(), w.len())?;
        Ok(match self {
            Regularizer::BallBarrier { .. } => {
                let q = sqrt(1.0 + norm_sq(w));
                let mut h = SymMatrix::outer(w, -1.0 / ((1.0 + q) * (1.0 + q) * q));
                h.add_diagonal(1.0 / (1.0 + q));
                h
            }
            Regularizer::SimplexEntropy { .. } => {
                let s = implicit_softmax(w);
                let mut h = SymMatrix::outer(&s, -1.0);
                for (i, si) in s.iter().enumerate() {
                    h.set(i, i, si - si * si);
                }
                h
            }
        })
    }
}

/// `ln(1 + Σ e^{w_i})`, stable for large entries.
fn log1p_sum_exp(w: &[f64]) -> f64 {
    let m = w.iter().cloned().fold(0.0_f64, f64::max);
    m + ln(exp(-m) + w.iter().map(|v| exp(v - m)).sum::<f64>())
}

/// `e^{w_i} / (1 + Σ e^{w_j})`
fn implicit_softmax(w: &[f64]) -> Vec<f64> {
    let m = w.iter().cloned().fold(0.0_f64, f64::max);
    let z = exp(-m) + w.iter().map(|v| exp(v - m)).sum::<f64>();
    w.iter().map(|v| exp(v - m) / z).collect()
}

impl ConvexFunction for Regularizer {
    fn dim(&self) -> usize {
        self.primal_dim()
    }

    fn value(&self, x: &[f64]) -> Result<f64> {
        Regularizer::value(self, x)
    }

    fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.grad(x)
    }
}

/// The convex conjugate `ψ*` of a regularizer, as a function on dual points.
#[derive(Debug, Clone, Copy)]
pub struct Conjugate<'a>(pub &'a Regularizer);

impl ConvexFunction for Conjugate<'_> {
    fn dim(&self) -> usize {
        self.0.primal_dim()
    }

    fn value(&self, w: &[f64]) -> Result<f64> {
        self.0.conj_value(w)
    }

    fn gradient(&self, w: &[f64]) -> Result<Vec<f64>> {
        self.0.conj_grad(w)
    }
}

/// Asymmetry of the conjugate's Bregman divergence and its cubic bound:
/// `(|D(w, w2) - D(w2, w)|, (M/6) ‖w - w2‖³)`.
pub fn commutator_gap(reg: &Regularizer, w: &[f64], w2: &[f64]) -> Result<(f64, f64)> {
    let conj = Conjugate(reg);
    let forward = bregman(&conj, w, w2)?;
    let backward = bregman(&conj, w2, w)?;
    let r = distance(w, w2);
    Ok(((forward - backward).abs(), reg.m() / 6.0 * r * r * r))
}
