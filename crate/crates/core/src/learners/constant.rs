use alloc::vec::Vec;

use super::Learner;
use crate::error::{check_dim, Result};
use crate::losses::LossFn;

/// Plays the same point forever.
#[derive(Debug, Clone)]
pub struct Constant {
    point: Vec<f64>,
    rounds: usize,
}

impl Constant {
    pub fn new(point: Vec<f64>) -> Self {
        Constant { point, rounds: 0 }
    }
}

impl Learner for Constant {
    fn name(&self) -> &'static str {
        "constant"
    }

    fn dim(&self) -> usize {
        self.point.len()
    }

    fn act(&mut self) -> Result<Vec<f64>> {
        Ok(self.point.clone())
    }

    fn observe(&mut self, loss: &LossFn) -> Result<()> {
        check_dim(self.point.len(), loss.dim())?;
        self.rounds += 1;
        Ok(())
    }

    fn observations(&self) -> usize {
        self.rounds
    }
}
