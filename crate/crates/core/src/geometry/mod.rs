//! Convex-analysis primitives shared by the learners.

mod divergence;
mod domain;
mod regularizer;

pub use divergence::{bregman, kl, ConvexFunction, HalfSquaredNorm, NegativeEntropy};
pub use domain::{
    embedded_to_simplex, project_simplex, shrink_comparator, simplex_to_embedded, Domain,
};
pub use regularizer::{commutator_gap, Conjugate, Regularizer, BOUNDARY_TOLERANCE};
