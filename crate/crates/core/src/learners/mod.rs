//! Online learners behind a uniform `act` / `observe` contract.
//!
//! A round is: `x_t = act()`, the environment reveals `f_t`, `observe(f_t)`.
//! Calling `act` again before the next `observe` returns the same decision.

mod chedge;
mod constant;
mod ftrl;
mod hedge;
mod oogd;
mod prmplus;
pub mod rates;

pub use chedge::ContinuousHedge;
pub use constant::Constant;
pub use ftrl::{Ftrl, NewtonSettings};
pub use hedge::Hedge;
pub use oogd::Oogd;
pub use prmplus::PrmPlus;

use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::error::Result;
use crate::losses::LossFn;

pub trait Learner: Send {
    fn name(&self) -> &'static str;

    /// Length of the decision vector.
    fn dim(&self) -> usize;

    /// Decision for the upcoming round.
    fn act(&mut self) -> Result<Vec<f64>>;

    fn observe(&mut self, loss: &LossFn) -> Result<()>;

    /// Number of losses observed so far.
    fn observations(&self) -> usize;

    /// Per-round Bregman commutator between consecutive decisions, for
    /// learners where it has a meaning (`None` otherwise).
    fn commutator(&self, _current: &[f64], _next: &[f64]) -> Option<f64> {
        None
    }
}

impl<L: Learner + ?Sized> Learner for Box<L> {
    fn name(&self) -> &'static str {
        (**self).name()
    }

    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn act(&mut self) -> Result<Vec<f64>> {
        (**self).act()
    }

    fn observe(&mut self, loss: &LossFn) -> Result<()> {
        (**self).observe(loss)
    }

    fn observations(&self) -> usize {
        (**self).observations()
    }

    fn commutator(&self, current: &[f64], next: &[f64]) -> Option<f64> {
        (**self).commutator(current, next)
    }
}

pub(crate) fn linear_loss<'a>(loss: &'a LossFn, dim: usize, who: &str) -> Result<&'a [f64]> {
    let ell = loss.as_linear().ok_or_else(|| {
        crate::Error::UnsupportedLoss(alloc::format!("{who} accepts linear losses only, got {}", loss.kind()))
    })?;
    crate::error::check_dim(dim, ell.len())?;
    Ok(ell)
}

pub(crate) fn check_eta(eta: f64) -> Result<()> {
    if eta > 0.0 && eta.is_finite() {
        Ok(())
    } else {
        Err(crate::Error::InvalidParameter(alloc::format!(
            "learning rate must be positive and finite, got {eta}"
        )))
    }
}
