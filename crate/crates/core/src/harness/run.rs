//! Single runs: drive one optimizer on one problem and log metrics rows.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::optimizers::{Method, StepRecord};
use crate::problems::StochasticProblem;
use crate::rng::RunStreams;
use crate::vector::Vector;

use super::config::RunConfig;

/// A run is flagged diverged once `‖x‖` exceeds this multiple of `1 + ‖x₀‖`.
pub const DIVERGENCE_GROWTH: f64 = 1e6;

/// One logged state `x_t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub step: u64,
    /// True objective `F(x_t)`.
    pub loss: f64,
    /// `‖∇F(x_t)‖`.
    pub grad_norm: f64,
    /// Learning rate held after step `t` (`eta0` at step 0).
    pub eta: f64,
    /// Most recent alignment increment; NaN when the method has none yet.
    pub alignment: f64,
    /// Most recent `L_t`; NaN when not estimated.
    pub lipschitz_local: f64,
    /// Most recent `L̃_t` (normalized-momentum variant only); NaN otherwise.
    pub lipschitz_tilde: f64,
    /// Cumulative stochastic gradient evaluations.
    pub grad_evals: u64,
    pub wall_nanos: u64,
    pub diverged: bool,
    /// Held-out logistic loss, when requested.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub held_out_loss: Option<f64>,
}

/// The rows of a run plus how it ended.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub rows: Vec<MetricsRow>,
    pub diverged: bool,
    pub divergence_reason: Option<String>,
    /// Step-level invariant breaches; see [`check_step_invariants`].
    pub invariant_violations: Vec<String>,
}

impl RunOutcome {
    pub fn final_row(&self) -> Option<&MetricsRow> {
        self.rows.last()
    }
}

/// Per-step invariants of the learning-rate controllers, checked on every
/// step of every run.
///
/// - clipped variants: the rate played and the rate held lie in `[0, cap]`;
/// - normalized momentum: a moving step has length exactly `η_t` (1e-12);
/// - AdGD: `η_t` does not exceed either candidate.
pub fn check_step_invariants(method: Method, eta_cap: Option<f64>, rec: &StepRecord) -> Option<String> {
    let in_range = |eta: f64, cap: f64| (0.0..=cap).contains(&eta);
    match method {
        Method::GalaSgd | Method::NsgdGala => {
            let cap = rec.eta_max.or(eta_cap).unwrap_or(f64::INFINITY);
            if !in_range(rec.eta_played, cap) || !in_range(rec.eta_next, cap) {
                return Some(format!(
                    "step {}: eta {} / {} outside [0, {cap}]",
                    rec.step, rec.eta_played, rec.eta_next
                ));
            }
            if method == Method::NsgdGala
                && rec.moved
                && (rec.step_length - rec.eta_played).abs() > 1e-12 * rec.eta_played.max(1.0)
            {
                return Some(format!(
                    "step {}: step length {} differs from eta {}",
                    rec.step, rec.step_length, rec.eta_played
                ));
            }
        }
        Method::Adgd => {
            if let Some((growth, curvature)) = rec.adgd_bounds {
                if rec.eta_played > growth || rec.eta_played > curvature {
                    return Some(format!(
                        "step {}: eta {} above min({growth}, {curvature})",
                        rec.step, rec.eta_played
                    ));
                }
            }
        }
        _ => {}
    }
    None
}

struct Logger<'a> {
    problem: &'a StochasticProblem,
    held_out: bool,
    started: Instant,
    rows: Vec<MetricsRow>,
}

impl Logger<'_> {
    fn push(&mut self, step: u64, x: &Vector, eta: f64, last: Option<&StepRecord>, evals: u64, diverged: bool) {
        let nan_or = |v: Option<f64>| v.unwrap_or(f64::NAN);
        let loss = self.problem.value(x).unwrap_or(f64::NAN);
        let grad_norm = self.problem.true_gradient(x).map_or(f64::NAN, |g| g.norm());
        let held_out_loss = self.held_out.then(|| match self.problem {
            StochasticProblem::LogisticSynthetic(p) => p.held_out_value(x).unwrap_or(f64::NAN),
            _ => f64::NAN,
        });
        self.rows.push(MetricsRow {
            step,
            loss,
            grad_norm,
            eta,
            alignment: nan_or(last.and_then(StepRecord::alignment)),
            lipschitz_local: nan_or(last.and_then(|r| r.lipschitz)),
            lipschitz_tilde: nan_or(last.and_then(|r| r.lipschitz_tilde)),
            grad_evals: evals,
            wall_nanos: self.started.elapsed().as_nanos() as u64,
            diverged,
            held_out_loss,
        });
    }
}

/// Executes one configured run.
///
/// Rows are logged at step 0, every `log_every` steps and at the final step.
/// A step that fails numerically, or an iterate that leaves the ball of
/// radius `DIVERGENCE_GROWTH·(1 + ‖x₀‖)`, ends the run with a terminal row
/// flagged `diverged`.
pub fn run_experiment(cfg: &RunConfig) -> Result<RunOutcome> {
    cfg.validate()?;
    let problem = cfg.problem.build()?;
    let x0 = cfg.start_point(&problem)?;
    let bound = DIVERGENCE_GROWTH * (1.0 + x0.norm());
    let method = cfg.optimizer.method();
    let eta_cap = cfg.optimizer.eta_cap();
    let mut opt = cfg.optimizer.build(x0, cfg.eta0)?;
    let mut streams = RunStreams::new(cfg.seed);

    let mut log = Logger {
        problem: &problem,
        held_out: cfg.held_out,
        started: Instant::now(),
        rows: Vec::new(),
    };
    let mut outcome = RunOutcome {
        rows: Vec::new(),
        diverged: false,
        divergence_reason: None,
        invariant_violations: Vec::new(),
    };
    let mut evals = 0u64;
    let mut last: Option<StepRecord> = None;
    log.push(0, opt.x(), opt.eta(), None, 0, false);

    for t in 1..=cfg.steps {
        let failure = match opt.step(&problem, &mut streams) {
            Ok(rec) => {
                evals += rec.grad_evals;
                if let Some(v) = check_step_invariants(method, eta_cap, &rec) {
                    outcome.invariant_violations.push(v);
                }
                last = Some(rec);
                let norm = opt.x().norm();
                if !(norm <= bound) {
                    Some(format!("‖x‖ = {norm:e} exceeds {bound:e}"))
                } else {
                    None
                }
            }
            Err(e) => Some(e.to_string()),
        };
        if let Some(reason) = failure {
            log.push(t, opt.x(), opt.eta(), last.as_ref(), evals, true);
            outcome.diverged = true;
            outcome.divergence_reason = Some(reason);
            break;
        }
        if t % cfg.log_every == 0 || t == cfg.steps {
            log.push(t, opt.x(), opt.eta(), last.as_ref(), evals, false);
        }
    }
    outcome.rows = log.rows;
    Ok(outcome)
}
