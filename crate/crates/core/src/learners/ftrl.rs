use alloc::vec;
use alloc::vec::Vec;

use super::{check_eta, Learner};
use crate::error::{check_dim, Error, Result};
use crate::geometry::{bregman, Regularizer};
use crate::linalg::SymMatrix;
use crate::losses::{LossFn, LossSum};
use crate::math::{log_sum_exp, norm};

/// Damped Newton parameters for the FTRL inner problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonSettings {
    /// Stop when `‖∇F‖ ≤ tolerance · max(1, scale)`, where `scale` is the
    /// size of the two gradient terms being balanced.
    pub tolerance: f64,
    pub max_iterations: usize,
    pub armijo: f64,
    pub shrink: f64,
}

impl Default for NewtonSettings {
    fn default() -> Self {
        NewtonSettings {
            tolerance: 1e-10,
            max_iterations: 100,
            armijo: 1e-4,
            shrink: 0.5,
        }
    }
}

/// Follow the regularized leader:
/// `x_t = argmin Σ_{τ<t} f_τ(x) + ψ(x)/η`.
///
/// Decisions are in loss coordinates: points of `R^d` for the ball barrier,
/// full distributions for the simplex entropy. The regularizer itself works
/// in its own (embedded) coordinates; see [`Ftrl::to_primal`].
#[derive(Debug, Clone)]
pub struct Ftrl {
    reg: Regularizer,
    eta: f64,
    sum: LossSum,
    settings: NewtonSettings,
    /// Last solution in regularizer coordinates.
    warm: Vec<f64>,
    cached: Option<Vec<f64>>,
    last_was_black_box: bool,
    rounds: usize,
    last_residual: f64,
    last_iterations: usize,
}

impl Ftrl {
    pub fn new(reg: Regularizer, eta: f64) -> Result<Self> {
        check_eta(eta)?;
        let native = native_dim(&reg);
        Ok(Ftrl {
            reg,
            eta,
            sum: LossSum::new(native),
            settings: NewtonSettings::default(),
            warm: center(&reg),
            cached: None,
            last_was_black_box: false,
            rounds: 0,
            last_residual: 0.0,
            last_iterations: 0,
        })
    }

    pub fn with_settings(mut self, settings: NewtonSettings) -> Self {
        self.settings = settings;
        self
    }

    pub fn regularizer(&self) -> &Regularizer {
        &self.reg
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn losses(&self) -> &LossSum {
        &self.sum
    }

    /// Optimality residual `‖∇F_t(x_t)‖` of the latest solve.
    pub fn last_residual(&self) -> f64 {
        self.last_residual
    }

    /// Newton iterations used by the latest solve (0 for closed forms).
    pub fn last_iterations(&self) -> usize {
        self.last_iterations
    }

    /// Loss coordinates to regularizer coordinates.
    pub fn to_primal(&self, x: &[f64]) -> Vec<f64> {
        match self.reg {
            Regularizer::BallBarrier { .. } => x.to_vec(),
            Regularizer::SimplexEntropy { experts } => x[..experts - 1].to_vec(),
        }
    }

    /// Regularizer coordinates to loss coordinates.
    pub fn to_native(&self, y: &[f64]) -> Vec<f64> {
        match self.reg {
            Regularizer::BallBarrier { .. } => y.to_vec(),
            Regularizer::SimplexEntropy { .. } => {
                let mut p = y.to_vec();
                p.push(1.0 - y.iter().sum::<f64>());
                p
            }
        }
    }

    /// Pulls a loss-coordinate gradient back to regularizer coordinates.
    pub fn primal_gradient(&self, g: &[f64]) -> Vec<f64> {
        match self.reg {
            Regularizer::BallBarrier { .. } => g.to_vec(),
            Regularizer::SimplexEntropy { experts } => {
                let last = g[experts - 1];
                g[..experts - 1].iter().map(|v| v - last).collect()
            }
        }
    }

    fn objective(&self, y: &[f64]) -> Result<f64> {
        Ok(self.sum.eval(&self.to_native(y))? + self.reg.value(y)? / self.eta)
    }

    /// Gradient of `F_t` and the scale used by the stopping rule.
    fn gradient(&self, y: &[f64]) -> Result<(Vec<f64>, f64)> {
        let gl = self.primal_gradient(&self.sum.grad(&self.to_native(y))?);
        let gr = self.reg.grad(y)?;
        let scale = norm(&gl) + norm(&gr) / self.eta;
        let g = gl.iter().zip(&gr).map(|(a, b)| a + b / self.eta).collect();
        Ok((g, scale))
    }

    fn hessian(&self, y: &[f64]) -> Result<SymMatrix> {
        let hl = self.sum.hessian(&self.to_native(y))?;
        let mut h = match self.reg {
            Regularizer::BallBarrier { .. } => hl,
            Regularizer::SimplexEntropy { experts } => {
                let k = experts - 1;
                let mut p = vec![0.0; experts * k];
                for i in 0..k {
                    p[i * k + i] = 1.0;
                    p[k * k + i] = -1.0;
                }
                hl.congruence(&p, k)
            }
        };
        h.add_scaled(1.0 / self.eta, &self.reg.hessian(y)?);
        Ok(h)
    }

    /// Closed form when every observed loss is linear.
    fn solve_linear(&mut self) -> Result<Vec<f64>> {
        let g = self.sum.linear_part();
        let x = match self.reg {
            Regularizer::BallBarrier { .. } => {
                let w: Vec<f64> = g.iter().map(|v| -self.eta * v).collect();
                let x = self.reg.conj_grad(&w)?;
                let (r, _) = self.gradient(&x)?;
                self.last_residual = norm(&r);
                x
            }
            Regularizer::SimplexEntropy { experts } => {
                let s: Vec<f64> = g.iter().map(|v| -self.eta * v).collect();
                let lse = log_sum_exp(&s);
                let logp: Vec<f64> = s.iter().map(|v| v - lse).collect();
                // residual in log space, which stays finite when weights underflow
                let last = experts - 1;
                let r: Vec<f64> = (0..last)
                    .map(|i| (g[i] - g[last]) + (logp[i] - logp[last]) / self.eta)
                    .collect();
                self.last_residual = norm(&r);
                logp.iter().map(|v| crate::math::exp(*v)).collect()
            }
        };
        self.last_iterations = 0;
        Ok(x)
    }

    fn solve_newton(&mut self) -> Result<Vec<f64>> {
        let s = self.settings;
        let mut y = if self.reg.check_interior(&self.warm).is_ok() {
            self.warm.clone()
        } else {
            center(&self.reg)
        };
        let mut value = self.objective(&y)?;
        let mut residual = f64::INFINITY;
        for it in 0..=s.max_iterations {
            let (g, scale) = self.gradient(&y)?;
            residual = norm(&g);
            if residual <= s.tolerance * scale.max(1.0) {
                self.last_residual = residual;
                self.last_iterations = it;
                self.warm = y.clone();
                return Ok(self.to_native(&y));
            }
            if it == s.max_iterations {
                break;
            }
            let h = self.hessian(&y)?;
            let step: Vec<f64> = h.cholesky()?.solve(&g).iter().map(|v| -v).collect();
            let slope: f64 = g.iter().zip(&step).map(|(a, b)| a * b).sum();
            let mut t = 1.0;
            let mut accepted = None;
            for _ in 0..80 {
                let cand: Vec<f64> = y.iter().zip(&step).map(|(a, b)| a + t * b).collect();
                if self.reg.check_interior(&cand).is_ok() {
                    let v = self.objective(&cand)?;
                    if v <= value + s.armijo * t * slope {
                        accepted = Some((cand, v));
                        break;
                    }
                    // Near the optimum F is flat to rounding; fall back to the gradient.
                    if (v - value).abs() <= 1e-13 * value.abs().max(1.0)
                        && norm(&self.gradient(&cand)?.0) < residual
                    {
                        accepted = Some((cand, v));
                        break;
                    }
                }
                t *= s.shrink;
            }
            match accepted {
                Some((cand, v)) => {
                    y = cand;
                    value = v;
                }
                None => break,
            }
        }
        Err(Error::Convergence {
            iterations: s.max_iterations,
            residual,
        })
    }

    fn solve(&mut self) -> Result<Vec<f64>> {
        if self.sum.is_linear() {
            let x = self.solve_linear()?;
            self.warm = self.to_primal(&x);
            Ok(x)
        } else {
            self.solve_newton()
        }
    }
}

fn native_dim(reg: &Regularizer) -> usize {
    match reg {
        Regularizer::BallBarrier { dim } => *dim,
        Regularizer::SimplexEntropy { experts } => *experts,
    }
}

fn center(reg: &Regularizer) -> Vec<f64> {
    match reg {
        Regularizer::BallBarrier { dim } => vec![0.0; *dim],
        Regularizer::SimplexEntropy { experts } => vec![1.0 / *experts as f64; experts - 1],
    }
}

impl Learner for Ftrl {
    fn name(&self) -> &'static str {
        "ftrl"
    }

    fn dim(&self) -> usize {
        native_dim(&self.reg)
    }

    fn act(&mut self) -> Result<Vec<f64>> {
        if let Some(x) = &self.cached {
            return Ok(x.clone());
        }
        let x = self.solve()?;
        self.cached = Some(x.clone());
        Ok(x)
    }

    fn observe(&mut self, loss: &LossFn) -> Result<()> {
        check_dim(native_dim(&self.reg), loss.dim())?;
        self.sum.add(loss)?;
        self.last_was_black_box = matches!(loss, LossFn::BlackBox(_));
        self.cached = None;
        self.rounds += 1;
        Ok(())
    }

    fn observations(&self) -> usize {
        self.rounds
    }

    /// `D_{F_t}(x_t, x_{t+1}) - D_{F_t}(x_{t+1}, x_t)`, where `F_t` holds the
    /// losses before the latest one. Quadratic terms cancel, leaving the
    /// regularizer part and any black-box terms.
    fn commutator(&self, current: &[f64], next: &[f64]) -> Option<f64> {
        let a = self.to_primal(current);
        let b = self.to_primal(next);
        let reg = bregman(&self.reg, &a, &b).ok()? - bregman(&self.reg, &b, &a).ok()?;
        let bb = if self.sum.has_black_boxes() {
            self.sum
                .black_box_asymmetry(current, next, self.last_was_black_box)
                .ok()?
        } else {
            0.0
        };
        Some(reg / self.eta + bb)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learners::Hedge;
    use crate::losses::BlackBoxLoss;
    use crate::rng::SplitMix64;

    #[test]
    fn ball_starts_at_center() {
        let mut f = Ftrl::new(Regularizer::ball_barrier(2).unwrap(), 0.5).unwrap();
        assert_eq!(f.act().unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn ball_linear_closed_form() {
        let eta = 0.5;
        let mut f = Ftrl::new(Regularizer::ball_barrier(2).unwrap(), eta).unwrap();
        let g = 3f64.sqrt() / eta;
        f.observe(&LossFn::linear(vec![g, 0.0])).unwrap();
        let x = f.act().unwrap();
        assert!((x[0] + 3f64.sqrt() / 3.0).abs() < 1e-15);
        assert_eq!(x[1], 0.0);
        assert!(f.last_residual() < 1e-10);
    }

    #[test]
    fn simplex_linear_matches_hedge() {
        let eta = 0.3;
        let mut f = Ftrl::new(Regularizer::simplex_entropy(4).unwrap(), eta).unwrap();
        let mut h = Hedge::new(4, eta).unwrap();
        let mut rng = SplitMix64::new(9);
        for _ in 0..200 {
            let p = f.act().unwrap();
            let q = h.act().unwrap();
            for (a, b) in p.iter().zip(&q) {
                assert!((a - b).abs() < 1e-9);
            }
            let ell = LossFn::linear((0..4).map(|_| rng.uniform(0.0, 1.0)).collect());
            f.observe(&ell).unwrap();
            h.observe(&ell).unwrap();
        }
    }

    #[test]
    fn quadratic_on_ball_is_stationary() {
        let eta = 0.2;
        let mut f = Ftrl::new(Regularizer::ball_barrier(2).unwrap(), eta).unwrap();
        let q = LossFn::quadratic(&[vec![1.0, 0.2], vec![0.2, 0.5]], vec![-3.0, 1.0], 0.0).unwrap();
        for _ in 0..30 {
            f.observe(&q).unwrap();
        }
        let x = f.act().unwrap();
        // ∇(30 q)(x) + ∇ψ(x)/η = 0
        let s = 1.0 - x[0] * x[0] - x[1] * x[1];
        let gx = 30.0 * (2.0 * (1.0 * x[0] + 0.2 * x[1]) - 3.0) + 2.0 * x[0] / (s * eta);
        let gy = 30.0 * (2.0 * (0.2 * x[0] + 0.5 * x[1]) + 1.0) + 2.0 * x[1] / (s * eta);
        assert!(gx.abs() < 1e-7 && gy.abs() < 1e-7, "{gx} {gy}");
        assert!(s > 0.0);
    }

    #[test]
    fn black_box_matches_quadratic() {
        let eta = 0.4;
        let quad = LossFn::quadratic(&[vec![0.5, 0.0], vec![0.0, 0.5]], vec![1.0, -2.0], 0.0).unwrap();
        let bb = LossFn::BlackBox(BlackBoxLoss::new(
            2,
            |x: &[f64]| 0.5 * (x[0] * x[0] + x[1] * x[1]) + x[0] - 2.0 * x[1],
            |x: &[f64]| vec![x[0] + 1.0, x[1] - 2.0],
        ));
        let mut a = Ftrl::new(Regularizer::ball_barrier(2).unwrap(), eta).unwrap();
        let mut b = Ftrl::new(Regularizer::ball_barrier(2).unwrap(), eta).unwrap();
        for _ in 0..5 {
            a.observe(&quad).unwrap();
            b.observe(&bb).unwrap();
            let xa = a.act().unwrap();
            let xb = b.act().unwrap();
            for (u, v) in xa.iter().zip(&xb) {
                assert!((u - v).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn act_is_idempotent_between_observations() {
        let mut f = Ftrl::new(Regularizer::simplex_entropy(3).unwrap(), 1.0).unwrap();
        f.observe(&LossFn::linear(vec![1.0, 0.0, 2.0])).unwrap();
        assert_eq!(f.act().unwrap(), f.act().unwrap());
    }
}
