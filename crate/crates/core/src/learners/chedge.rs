use alloc::vec;
use alloc::vec::Vec;

use super::{check_eta, Learner};
use crate::error::{check_dim, Error, Result};
use crate::geometry::Domain;
use crate::losses::{LossFn, LossSum};
use crate::math::exp;
use crate::quadrature::Cubature;

/// Successive quadrature levels must agree to this distance.
pub const CONVERGENCE_TOLERANCE: f64 = 1e-7;

/// Continuous exponential weights over a body in dimension ≤ 2.
///
/// `x_t` is the mean of `p_t(x) ∝ exp(-η Σ_{τ<t} f_τ(x))`, computed by
/// deterministic quadrature. The rule is refined by doubling until two
/// consecutive levels agree within [`CONVERGENCE_TOLERANCE`].
#[derive(Debug, Clone)]
pub struct ContinuousHedge {
    domain: Domain,
    eta: f64,
    sum: LossSum,
    rules: Vec<Cubature>,
    level: u32,
    max_level: u32,
    last_change: f64,
    cached: Option<Vec<f64>>,
    rounds: usize,
}

impl ContinuousHedge {
    pub fn new(domain: Domain, eta: f64) -> Result<Self> {
        check_eta(eta)?;
        let dim = domain.dim();
        if dim > 2 {
            return Err(Error::UnsupportedDimension(dim));
        }
        let max_level = if dim == 1 { 5 } else { 3 };
        let base = Cubature::for_domain(&domain, 0)?;
        Ok(ContinuousHedge {
            sum: LossSum::new(dim),
            domain,
            eta,
            rules: vec![base],
            level: 0,
            max_level,
            last_change: 0.0,
            cached: None,
            rounds: 0,
        })
    }

    /// Caps the refinement level (default 5 in 1-D, 3 in 2-D).
    pub fn with_max_level(mut self, level: u32) -> Self {
        self.max_level = level;
        self
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Distance between the last two quadrature levels in the latest `act`.
    pub fn last_change(&self) -> f64 {
        self.last_change
    }

    pub fn converged(&self) -> bool {
        self.last_change <= CONVERGENCE_TOLERANCE
    }

    fn rule(&mut self, level: u32) -> Result<&Cubature> {
        while self.rules.len() <= level as usize {
            let next = Cubature::for_domain(&self.domain, self.rules.len() as u32)?;
            self.rules.push(next);
        }
        Ok(&self.rules[level as usize])
    }

    /// Gibbs mean and total mass (relative to the largest weight) for one rule.
    fn mean(&mut self, level: u32) -> Result<Vec<f64>> {
        let eta = self.eta;
        let sum = self.sum.clone();
        let fast = FastSum::new(&sum);
        let rule = self.rule(level)?;
        let dim = rule.dim();
        let n = rule.len();
        let mut scores = Vec::with_capacity(n);
        for i in 0..n {
            let x = rule.point(i);
            let v = match &fast {
                Some(f) => f.eval(x),
                None => sum.eval(x)?,
            };
            scores.push(-eta * v);
        }
        let m = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if !m.is_finite() {
            return Err(Error::Domain("loss is not finite on the quadrature nodes".into()));
        }
        let mut mass = 0.0;
        let mut first = vec![0.0; dim];
        for (i, s) in scores.iter().enumerate() {
            let w = rule.weight(i) * exp(s - m);
            mass += w;
            for (acc, xi) in first.iter_mut().zip(rule.point(i)) {
                *acc += w * xi;
            }
        }
        Ok(first.iter().map(|v| v / mass).collect())
    }

    fn solve(&mut self) -> Result<Vec<f64>> {
        let mut level = self.level;
        let mut coarse = self.mean(level)?;
        loop {
            if level >= self.max_level {
                return Ok(coarse);
            }
            let fine = self.mean(level + 1)?;
            self.last_change = crate::math::distance(&coarse, &fine);
            if self.last_change <= CONVERGENCE_TOLERANCE {
                self.level = level;
                return Ok(fine);
            }
            coarse = fine;
            level += 1;
        }
    }
}

/// Allocation-free evaluation of a linear/quadratic aggregate in d ≤ 2.
struct FastSum {
    a: [[f64; 2]; 2],
    b: [f64; 2],
    c: f64,
    dim: usize,
}

impl FastSum {
    fn new(sum: &LossSum) -> Option<Self> {
        if sum.has_black_boxes() {
            return None;
        }
        let dim = sum.dim();
        let mut a = [[0.0; 2]; 2];
        if let Some(q) = sum.quadratic_part() {
            for (i, row) in a.iter_mut().enumerate().take(dim) {
                for (j, v) in row.iter_mut().enumerate().take(dim) {
                    *v = q.get(i, j);
                }
            }
        }
        let lin = sum.linear_part();
        let mut b = [0.0; 2];
        b[..dim].copy_from_slice(&lin);
        Some(FastSum {
            a,
            b,
            c: sum.constant_part(),
            dim,
        })
    }

    fn eval(&self, x: &[f64]) -> f64 {
        let mut v = self.c;
        for i in 0..self.dim {
            v += self.b[i] * x[i];
            for j in 0..self.dim {
                v += x[i] * self.a[i][j] * x[j];
            }
        }
        v
    }
}

impl Learner for ContinuousHedge {
    fn name(&self) -> &'static str {
        "continuous-hedge"
    }

    fn dim(&self) -> usize {
        self.domain.dim()
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
        check_dim(self.domain.dim(), loss.dim())?;
        self.sum.add(loss)?;
        self.cached = None;
        self.rounds += 1;
        Ok(())
    }

    fn observations(&self) -> usize {
        self.rounds
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn langevin_mean(a: f64) -> f64 {
        // E[x] for density ∝ e^{-a x} on [-1, 1]
        1.0 / a - 1.0 / libm::tanh(a)
    }

    #[test]
    fn uniform_means() {
        let mut c = ContinuousHedge::new(Domain::interval(-1.0, 1.0).unwrap(), 0.5).unwrap();
        assert!(c.act().unwrap()[0].abs() < 1e-15);
        let mut d = ContinuousHedge::new(Domain::unit_ball(2).unwrap(), 0.5).unwrap();
        let x = d.act().unwrap();
        assert!(x[0].abs() < 1e-14 && x[1].abs() < 1e-14);
    }

    #[test]
    fn interval_linear_matches_closed_form() {
        for a in [0.01, 0.7, 3.0, 25.0, -4.0] {
            let mut c = ContinuousHedge::new(Domain::interval(-1.0, 1.0).unwrap(), 1.0).unwrap();
            c.observe(&LossFn::linear(vec![a])).unwrap();
            let x = c.act().unwrap()[0];
            assert!((x - langevin_mean(a)).abs() < 1e-6, "a={a}: {x}");
        }
    }

    #[test]
    fn rejects_dimension_three() {
        let err = ContinuousHedge::new(Domain::unit_ball(3).unwrap(), 0.5).unwrap_err();
        assert!(matches!(err, Error::UnsupportedDimension(3)));
    }
}
