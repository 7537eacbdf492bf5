//! Online learners with small *alternating* regret, plus the machinery to
//! measure and certify it.
//!
//! Alternating regret charges every loss twice: once at the decision that was
//! played (`f_t(x_t)`) and once at the decision produced right after `f_t`
//! was revealed (`f_t(x_{t+1})`). It is the quantity that governs the
//! convergence of alternating play in two-player games.
//!
//! The crate is `no_std` (it needs `alloc`) and is organized as
//!
//! * [`geometry`]: decision sets, Bregman divergences, Legendre regularizers
//!   and their conjugates;
//! * [`losses`]: linear, quadratic and black-box losses with certified
//!   constants;
//! * [`learners`]: Hedge, FTRL, continuous Hedge, optimistic OGD and PRM+
//!   behind the [`learners::Learner`] trait;
//! * [`regret`]: standard / cheating / alternating regret accounting;
//! * [`dynamics`]: alternating two-player dynamics and NE / CCE gaps;
//! * [`adversary`]: lower-bound loss sequences and their closed forms.
#![cfg_attr(not(test), no_std)]
// Negated float comparisons are used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod adversary;
pub mod dynamics;
pub mod error;
pub mod geometry;
pub mod learners;
pub mod linalg;
pub mod losses;
pub mod math;
pub mod quadrature;
pub mod regret;
pub mod rng;

pub use error::{Error, Result};
