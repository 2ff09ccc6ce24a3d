use crate::error::{GalaError, Result};
use crate::online_lr::{lipschitz_estimate, SurrogateCoeffs, DEFAULT_EPS_DISP};
use crate::problems::StochasticProblem;
use crate::rng::RunStreams;
use crate::vector::Vector;

use super::{check_eta0, check_start, Method, Optimizer, StepRecord};

/// Practical SGD-GALA.
///
/// Alignment is measured between consecutive iterates on one shared batch:
/// iteration `t+1` draws ξ_{t+1}, evaluates it at `x_{t+1}` and at `x_t`, and
/// charges `L_t‖g_t(x_t)‖²` to the denominator, where `g_t(x_t)` is the
/// gradient that produced the last step. The new rate
/// `η_{t+1} = max(Σ⟨·,·⟩ / Σ L‖g‖², eta_floor)` is unclipped above and is
/// used immediately for the step from `x_{t+1}` with the batch-ξ_{t+1}
/// gradient. The first iteration is a plain SGD step with `η₀`.
#[derive(Debug, Clone)]
pub struct HeuristicGala {
    x: Vector,
    x_prev: Option<Vector>,
    g_prev: Vector,
    eta: f64,
    numer: f64,
    denom: f64,
    eta_floor: f64,
    step_count: u64,
    eps_disp: f64,
}

impl HeuristicGala {
    pub fn new(x0: Vector, eta0: f64, eta_floor: f64) -> Result<Self> {
        check_start(&x0)?;
        check_eta0(eta0)?;
        if !eta_floor.is_finite() {
            return Err(GalaError::invalid("eta_floor", "must be finite"));
        }
        let dim = x0.dim();
        Ok(HeuristicGala {
            x: x0,
            x_prev: None,
            g_prev: Vector::zeros(dim),
            eta: eta0,
            numer: 0.0,
            denom: 0.0,
            eta_floor,
            step_count: 0,
            eps_disp: DEFAULT_EPS_DISP,
        })
    }

    pub fn numer(&self) -> f64 {
        self.numer
    }

    pub fn denom(&self) -> f64 {
        self.denom
    }
}

impl Optimizer for HeuristicGala {
    fn method(&self) -> Method {
        Method::GalaSgdHeuristic
    }

    fn x(&self) -> &Vector {
        &self.x
    }

    fn eta(&self) -> f64 {
        self.eta
    }

    fn steps_taken(&self) -> u64 {
        self.step_count
    }

    fn step(&mut self, problem: &StochasticProblem, streams: &mut RunStreams) -> Result<StepRecord> {
        self.x.check_dim(problem.dim())?;
        let key = streams.sample.sample_key();
        let g = problem.sample_gradient(&self.x, key)?;
        let mut evals = 1;
        let mut surrogate = None;
        let mut lipschitz = None;

        if let Some(x_prev) = &self.x_prev {
            let g_back = problem.sample_gradient(x_prev, key)?;
            evals += 1;
            let lip = lipschitz_estimate(&g, &g_back, &self.x, x_prev, self.eps_disp)?;
            let linear = g.dot(&g_back)?;
            let curvature = lip * self.g_prev.norm_sq();
            self.numer += linear;
            self.denom += curvature;
            if !self.numer.is_finite() || !self.denom.is_finite() {
                return Err(GalaError::NonFinite {
                    what: "learning-rate sums",
                });
            }
            let eta_charged = self.eta;
            if self.denom > 0.0 {
                self.eta = (self.numer / self.denom).max(self.eta_floor);
            }
            surrogate = Some((SurrogateCoeffs::new(linear, 0.5 * curvature)?, eta_charged));
            lipschitz = Some(lip);
        }

        let eta_played = self.eta;
        let x_next = self.x.plus_scaled(-eta_played, &g)?;
        x_next.ensure_finite("iterate")?;
        let step_length = x_next.distance(&self.x)?;
        self.x_prev = Some(std::mem::replace(&mut self.x, x_next));
        self.g_prev = g;

        let record = StepRecord {
            step: self.step_count,
            eta_played,
            eta_next: self.eta,
            step_length,
            surrogate,
            lipschitz,
            lipschitz_tilde: None,
            grad_evals: evals,
            eta_max: None,
            adgd_bounds: None,
            moved: step_length > 0.0,
        };
        self.step_count += 1;
        Ok(record)
    }
}
