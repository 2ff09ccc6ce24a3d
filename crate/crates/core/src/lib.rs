//! Learning-rate adaptation by online learning over gradient-alignment
//! surrogates.
//!
//! The crate is organised bottom-up:
//!
//! - [`vector`] and [`rng`]: dense vectors, interval clipping, splittable
//!   random streams.
//! - [`problems`]: stochastic objectives with seeded samples and exact
//!   gradients.
//! - [`online_lr`]: surrogate losses, local Lipschitz estimates, FTRL and
//!   optimistic FTRL over the learning rate, and a regret oracle.
//! - [`optimizers`]: SGD-GALA, normalized-momentum GALA, the practical
//!   SGD-GALA and Adam-GALA variants, AdGD, and SGD/momentum/Adam baselines.
//! - [`verification`]: executable checks of the supporting inequalities and
//!   estimator properties.
//! - [`harness`]: configs, runs, sweeps, CSV/summary output and the CLI.

// Validation is written as `!(x >= 0.0)` and similar so that NaN is rejected
// by the same comparison.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod harness;
pub mod online_lr;
pub mod optimizers;
pub mod problems;
pub mod rng;
pub mod vector;
pub mod verification;

pub use error::{GalaError, Result};
pub use vector::{clip_interval, dot, norm, Interval, Vector};
