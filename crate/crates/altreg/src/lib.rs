//! Experiment harness for alternating-regret learners: configuration,
//! runs, sweeps, exponent fits and oracle checks.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod error;
pub mod experiment;
pub mod fit;
pub mod format;
pub mod game;
pub mod runner;
pub mod setup;
pub mod trace;
pub mod verify;

pub use error::{HarnessError, Result};
