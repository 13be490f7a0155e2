//! Entropy arithmetic on abelian groups.
//!
//! This crate computes entropies, Ruzsa divergences, and doubling/difference
//! constants for probability distributions on locally compact abelian groups
//! (finite products of cyclic groups, grid-discretized `R^n`, the circle, and
//! the multiplicative groups of positive reals and nonzero complex numbers via
//! their log-isomorphisms). On top of that machinery sits a registry of named
//! inequality checks -- triangle inequality and subadditivity for the Ruzsa
//! divergence, Plünnecke-Ruzsa and Balog-Szemerédi-Gowers entropy analogues,
//! sum-difference bounds, reverse entropy power inequalities for log-concave
//! densities, determinant inequalities for positive-definite matrices -- each
//! evaluated as an explicit `lhs <= rhs` slack computation, plus ensemble
//! drivers and a numerical extremizer search over distribution spaces.
//!
//! All entropies are in nats.

pub mod checks;
pub mod convolve;
pub mod density;
pub mod entropy;
pub mod error;
pub mod group;
pub mod pdmatrix;
pub mod report;
pub mod ruzsa;
pub mod search;

pub use error::{Error, Result};

/// Euler-Mascheroni constant, used in the Gamma entropy closed form.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
