use alloc::vec;
use alloc::vec::Vec;

use super::{linear_loss, Learner};
use crate::error::Result;
use crate::losses::LossFn;
use crate::math::dot;

/// Predictive regret matching+.
///
/// Plays `R̂_t / ‖R̂_t‖₁` with `R̂_t = [R_t + r_{t-1}]⁺`, where
/// `r_t = <p_t, ℓ_t> 1 - ℓ_t` and `R_{t+1} = [R_t + r_t]⁺`.
/// When `R̂_t = 0` the uniform distribution is played.
#[derive(Debug, Clone)]
pub struct PrmPlus {
    regrets: Vec<f64>,
    last_instant: Vec<f64>,
    rounds: usize,
}

impl PrmPlus {
    pub fn new(actions: usize) -> Result<Self> {
        if actions == 0 {
            return Err(crate::Error::InvalidParameter("PRM+ needs at least one action".into()));
        }
        Ok(PrmPlus {
            regrets: vec![0.0; actions],
            last_instant: vec![0.0; actions],
            rounds: 0,
        })
    }

    /// `R_t`
    pub fn regrets(&self) -> &[f64] {
        &self.regrets
    }

    /// `r_{t-1}`
    pub fn last_instant(&self) -> &[f64] {
        &self.last_instant
    }

    /// `R̂_t`
    pub fn predicted(&self) -> Vec<f64> {
        self.regrets
            .iter()
            .zip(&self.last_instant)
            .map(|(r, i)| (r + i).max(0.0))
            .collect()
    }

    pub fn distribution(&self) -> Vec<f64> {
        let hat = self.predicted();
        let total: f64 = hat.iter().sum();
        if total > 0.0 {
            hat.iter().map(|v| v / total).collect()
        } else {
            vec![1.0 / hat.len() as f64; hat.len()]
        }
    }
}

impl Learner for PrmPlus {
    fn name(&self) -> &'static str {
        "prm+"
    }

    fn dim(&self) -> usize {
        self.regrets.len()
    }

    fn act(&mut self) -> Result<Vec<f64>> {
        Ok(self.distribution())
    }

    fn observe(&mut self, loss: &LossFn) -> Result<()> {
        let ell = linear_loss(loss, self.regrets.len(), "PRM+")?;
        let p = self.distribution();
        let played = dot(&p, ell);
        let instant: Vec<f64> = ell.iter().map(|l| played - l).collect();
        for (r, i) in self.regrets.iter_mut().zip(&instant) {
            *r = (*r + i).max(0.0);
        }
        self.last_instant = instant;
        self.rounds += 1;
        Ok(())
    }

    fn observations(&self) -> usize {
        self.rounds
    }
}
