//! Optimizer step functions.
//!
//! Every variant owns its iterate and learning-rate state and advances one
//! iteration per [`Optimizer::step`], drawing samples from the run's
//! [`RunStreams`]. Each step returns a [`StepRecord`] with what the
//! learning-rate controller saw, so callers can log, replay and check
//! invariants without reaching into optimizer internals.

mod adam_gala;
mod adgd;
mod baseline;
mod gala_sgd;
mod heuristic;
mod nsgd_gala;

pub use adam_gala::{AdamGala, CurvatureNorm};
pub use adgd::Adgd;
pub use baseline::{Baseline, BaselineMethod};
pub use gala_sgd::GalaSgd;
pub use heuristic::HeuristicGala;
pub use nsgd_gala::NsgdGala;

use std::fmt;
use std::str::FromStr;

use crate::error::{GalaError, Result};
use crate::online_lr::SurrogateCoeffs;
use crate::problems::StochasticProblem;
use crate::rng::RunStreams;
use crate::vector::Vector;

pub const DEFAULT_ETA_MAX: f64 = 1.0;
pub const DEFAULT_NSGD_ALPHA: f64 = 0.1;
pub const DEFAULT_ETA_BAR: f64 = 1.0;
pub const DEFAULT_BETA1: f64 = 0.9;
pub const DEFAULT_BETA2: f64 = 0.999;
pub const DEFAULT_DELTA_ADAM: f64 = 1e-8;
pub const DEFAULT_MOMENTUM: f64 = 0.9;
pub const DEFAULT_ADGD_ALPHA: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    GalaSgd,
    NsgdGala,
    GalaSgdHeuristic,
    AdamGala,
    Adgd,
    Sgd,
    SgdMomentum,
    Adam,
}

impl Method {
    pub const ALL: [Method; 8] = [
        Method::GalaSgd,
        Method::NsgdGala,
        Method::GalaSgdHeuristic,
        Method::AdamGala,
        Method::Adgd,
        Method::Sgd,
        Method::SgdMomentum,
        Method::Adam,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Method::GalaSgd => "gala_sgd",
            Method::NsgdGala => "nsgd_gala",
            Method::GalaSgdHeuristic => "gala_sgd_heuristic",
            Method::AdamGala => "adam_gala",
            Method::Adgd => "adgd",
            Method::Sgd => "sgd",
            Method::SgdMomentum => "sgd_momentum",
            Method::Adam => "adam",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = GalaError;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| GalaError::invalid("optimizer", format!("unknown optimizer `{s}`")))
    }
}

/// What happened during one iteration `x_t → x_{t+1}`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct StepRecord {
    /// Index `t` of the iteration just taken.
    pub step: u64,
    /// Learning rate multiplying the direction in this iteration.
    pub eta_played: f64,
    /// Learning rate held by the optimizer afterwards.
    pub eta_next: f64,
    /// `‖x_{t+1} − x_t‖`.
    pub step_length: f64,
    /// Surrogate loss revealed in this iteration, with the learning rate it
    /// is charged against.
    pub surrogate: Option<(SurrogateCoeffs, f64)>,
    pub lipschitz: Option<f64>,
    pub lipschitz_tilde: Option<f64>,
    /// Stochastic gradient evaluations spent in this iteration.
    pub grad_evals: u64,
    /// Upper clip of the learning rate for clipped variants.
    pub eta_max: Option<f64>,
    /// AdGD's two candidates `(growth, curvature)`.
    pub adgd_bounds: Option<(f64, f64)>,
    /// Whether a nonzero direction moved the iterate.
    pub moved: bool,
}

impl StepRecord {
    /// The alignment increment that fed the learning-rate numerator.
    pub fn alignment(&self) -> Option<f64> {
        self.surrogate.map(|(c, _)| c.linear)
    }
}

pub trait Optimizer: Send {
    fn method(&self) -> Method;

    fn x(&self) -> &Vector;

    /// The learning rate the next step will use (or the last one computed).
    fn eta(&self) -> f64;

    fn steps_taken(&self) -> u64;

    fn step(&mut self, problem: &StochasticProblem, streams: &mut RunStreams) -> Result<StepRecord>;
}

pub(crate) fn check_eta0(eta0: f64) -> Result<()> {
    if !(eta0 >= 0.0) || !eta0.is_finite() {
        return Err(GalaError::invalid("eta0", format!("{eta0} must be finite and >= 0")));
    }
    Ok(())
}

pub(crate) fn check_start(x0: &Vector) -> Result<()> {
    if x0.dim() == 0 {
        return Err(GalaError::invalid("x0", "empty starting point"));
    }
    x0.ensure_finite("x0")
}

pub(crate) fn check_beta(name: &'static str, beta: f64) -> Result<()> {
    if !(0.0..1.0).contains(&beta) {
        return Err(GalaError::invalid(name, format!("{beta} not in [0, 1)")));
    }
    Ok(())
}

/// Shared test fixtures.
#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// `F(x) = x²/2` with no noise.
    pub fn half_square() -> StochasticProblem {
        StochasticProblem::quadratic(&[1.0], &[0.0], 0.0).unwrap()
    }

    pub fn run(opt: &mut dyn Optimizer, p: &StochasticProblem, seed: u64, n: usize) -> Vec<StepRecord> {
        let mut s = RunStreams::new(seed);
        (0..n).map(|_| opt.step(p, &mut s).unwrap()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.as_str().parse::<Method>().unwrap(), m);
        }
        assert!("mechanic".parse::<Method>().is_err());
    }
}
