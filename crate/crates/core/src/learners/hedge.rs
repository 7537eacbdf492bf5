use alloc::vec;
use alloc::vec::Vec;

use super::{check_eta, linear_loss, Learner};
use crate::error::Result;
use crate::geometry::kl;
use crate::losses::LossFn;
use crate::math::softmax;

const RECENTER_EVERY: usize = 10_000;

/// Multiplicative weights: `p_{t,i} ∝ exp(-η L_{t-1,i})`.
#[derive(Debug, Clone)]
pub struct Hedge {
    eta: f64,
    cumulative: Vec<f64>,
    rounds: usize,
}

impl Hedge {
    pub fn new(experts: usize, eta: f64) -> Result<Self> {
        check_eta(eta)?;
        if experts == 0 {
            return Err(crate::Error::InvalidParameter("Hedge needs at least one expert".into()));
        }
        Ok(Hedge {
            eta,
            cumulative: vec![0.0; experts],
            rounds: 0,
        })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Cumulative loss vector, up to a common shift.
    pub fn cumulative_loss(&self) -> &[f64] {
        &self.cumulative
    }

    pub fn distribution(&self) -> Vec<f64> {
        let scores: Vec<f64> = self.cumulative.iter().map(|l| -self.eta * l).collect();
        softmax(&scores)
    }
}

impl Learner for Hedge {
    fn name(&self) -> &'static str {
        "hedge"
    }

    fn dim(&self) -> usize {
        self.cumulative.len()
    }

    fn act(&mut self) -> Result<Vec<f64>> {
        Ok(self.distribution())
    }

    fn observe(&mut self, loss: &LossFn) -> Result<()> {
        let ell = linear_loss(loss, self.cumulative.len(), "Hedge")?;
        for (c, l) in self.cumulative.iter_mut().zip(ell) {
            *c += l;
        }
        self.rounds += 1;
        if self.rounds.is_multiple_of(RECENTER_EVERY) {
            // softmax is shift invariant
            let m = self.cumulative.iter().cloned().fold(f64::INFINITY, f64::min);
            for c in &mut self.cumulative {
                *c -= m;
            }
        }
        Ok(())
    }

    fn observations(&self) -> usize {
        self.rounds
    }

    /// `KL(p_t, p_{t+1}) - KL(p_{t+1}, p_t)`
    fn commutator(&self, current: &[f64], next: &[f64]) -> Option<f64> {
        Some(kl(current, next) - kl(next, current))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::exp;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn starts_uniform() {
        let mut h = Hedge::new(3, 0.3).unwrap();
        assert!(close(&h.act().unwrap(), &[1.0 / 3.0; 3], 1e-15));
    }

    #[test]
    fn cycle_iterates() {
        for eta in [0.1, 0.7, 2.0] {
            let mut h = Hedge::new(3, eta).unwrap();
            h.observe(&LossFn::linear(vec![1.0, 0.0, 0.0])).unwrap();
            let e = exp(-eta);
            let p = h.act().unwrap();
            assert!(close(&p, &[e / (2.0 + e), 1.0 / (2.0 + e), 1.0 / (2.0 + e)], 1e-15));
            h.observe(&LossFn::linear(vec![0.0, 1.0, 0.0])).unwrap();
            h.observe(&LossFn::linear(vec![0.0, 0.0, 1.0])).unwrap();
            assert!(close(&h.act().unwrap(), &[1.0 / 3.0; 3], 1e-15));
        }
    }

    #[test]
    fn rejects_nonlinear_and_bad_eta() {
        assert!(Hedge::new(3, 0.0).is_err());
        assert!(Hedge::new(3, f64::NAN).is_err());
        let mut h = Hedge::new(2, 0.1).unwrap();
        let q = LossFn::quadratic(&[vec![1.0, 0.0], vec![0.0, 1.0]], vec![0.0, 0.0], 0.0).unwrap();
        assert!(h.observe(&q).is_err());
        assert!(h.observe(&LossFn::linear(vec![1.0, 0.0, 0.0])).is_err());
    }

    #[test]
    fn recentering_preserves_the_distribution() {
        let mut h = Hedge::new(2, 0.01).unwrap();
        for _ in 0..(RECENTER_EVERY - 1) {
            h.observe(&LossFn::linear(vec![1.0, 0.5])).unwrap();
        }
        let before = h.act().unwrap();
        h.observe(&LossFn::linear(vec![0.0, 0.0])).unwrap();
        assert!(h.cumulative_loss().contains(&0.0));
        assert!(close(&h.act().unwrap(), &before, 1e-15));
    }
}
