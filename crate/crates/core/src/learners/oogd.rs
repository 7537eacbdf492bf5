use alloc::vec;
use alloc::vec::Vec;

use super::{check_eta, linear_loss, Learner};
use crate::error::Result;
use crate::geometry::project_simplex;
use crate::losses::LossFn;

/// Optimistic online gradient descent on the simplex, using the previous
/// loss as the prediction.
///
/// `p_t = Π(p̂_t - η m_t)`, then `p̂_{t+1} = Π(p̂_t - η ℓ_t)` and `m_{t+1} = ℓ_t`,
/// where `Π` is the Euclidean projection onto the simplex.
#[derive(Debug, Clone)]
pub struct Oogd {
    eta: f64,
    secondary: Vec<f64>,
    prediction: Vec<f64>,
    rounds: usize,
}

impl Oogd {
    pub fn new(experts: usize, eta: f64) -> Result<Self> {
        check_eta(eta)?;
        if experts == 0 {
            return Err(crate::Error::InvalidParameter("OOGD needs at least one action".into()));
        }
        Ok(Oogd {
            eta,
            secondary: vec![1.0 / experts as f64; experts],
            prediction: vec![0.0; experts],
            rounds: 0,
        })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// `p̂_t`
    pub fn secondary(&self) -> &[f64] {
        &self.secondary
    }

    /// `m_t`
    pub fn prediction(&self) -> &[f64] {
        &self.prediction
    }

    fn step(&self, direction: &[f64]) -> Vec<f64> {
        let v: Vec<f64> = self
            .secondary
            .iter()
            .zip(direction)
            .map(|(p, g)| p - self.eta * g)
            .collect();
        project_simplex(&v)
    }
}

impl Learner for Oogd {
    fn name(&self) -> &'static str {
        "oogd"
    }

    fn dim(&self) -> usize {
        self.secondary.len()
    }

    fn act(&mut self) -> Result<Vec<f64>> {
        Ok(self.step(&self.prediction))
    }

    fn observe(&mut self, loss: &LossFn) -> Result<()> {
        let ell = linear_loss(loss, self.secondary.len(), "OOGD")?.to_vec();
        self.secondary = self.step(&ell);
        self.prediction = ell;
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

    #[test]
    fn early_iterates_on_alternating_losses() {
        let eta = 0.01;
        let mut o = Oogd::new(2, eta).unwrap();
        let mut ps = Vec::new();
        for t in 1..=5 {
            ps.push(o.act().unwrap());
            let ell = if t % 2 == 1 { vec![-2.0, 0.0] } else { vec![4.0, 0.0] };
            o.observe(&LossFn::linear(ell)).unwrap();
        }
        let expect = [0.5, 0.52, 0.47, 0.51, 0.46];
        for (p, e) in ps.iter().zip(expect) {
            assert!((p[0] - e).abs() < 1e-12, "{p:?} vs {e}");
            assert!((p[0] + p[1] - 1.0).abs() < 1e-15);
        }
    }
}
