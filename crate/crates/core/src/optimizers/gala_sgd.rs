use crate::error::{GalaError, Result};
use crate::online_lr::{lipschitz_estimate, surrogate_sgd, FtrlAccumulator, DEFAULT_EPS_DISP};
use crate::problems::{segment_point, StochasticProblem};
use crate::rng::RunStreams;
use crate::vector::{Interval, Vector};

use super::{check_eta0, check_start, Method, Optimizer, StepRecord};

/// SGD whose learning rate is chosen by FTRL over gradient-alignment
/// surrogates, with the alignment measured at a uniformly random point of the
/// step segment using an independent sample.
///
/// One iteration costs three gradient evaluations: `g_t(x_t)` for the step,
/// then `g'_t(x_t)` and `g'_t(w_t)` on a fresh sample ξ'_t.
#[derive(Debug, Clone)]
pub struct GalaSgd {
    x: Vector,
    eta: f64,
    acc: FtrlAccumulator,
    step_count: u64,
    eps_disp: f64,
}

impl GalaSgd {
    pub fn new(x0: Vector, eta0: f64, delta: f64, eta_max: f64) -> Result<Self> {
        check_start(&x0)?;
        check_eta0(eta0)?;
        let range = Interval::up_to(eta_max)?;
        Ok(GalaSgd {
            x: x0,
            eta: eta0,
            acc: FtrlAccumulator::new(delta, range, true, eta0)?,
            step_count: 0,
            eps_disp: DEFAULT_EPS_DISP,
        })
    }

    pub fn accumulator(&self) -> &FtrlAccumulator {
        &self.acc
    }

    /// One iteration; `lambda_override` pins the segment position instead of
    /// drawing it.
    pub fn step_with(
        &mut self,
        problem: &StochasticProblem,
        streams: &mut RunStreams,
        lambda_override: Option<f64>,
    ) -> Result<StepRecord> {
        self.x.check_dim(problem.dim())?;
        let key = streams.sample.sample_key();
        let g = problem.sample_gradient(&self.x, key)?;
        let eta_played = self.eta;
        let x_next = self.x.plus_scaled(-eta_played, &g)?;
        x_next.ensure_finite("iterate")?;

        let key_prime = streams.sample_prime.sample_key();
        let lambda = match lambda_override {
            Some(l) if (0.0..=1.0).contains(&l) => l,
            Some(l) => return Err(GalaError::invalid("lambda_override", format!("{l} not in [0, 1]"))),
            None => streams.segment.uniform(),
        };
        let gp_x = problem.sample_gradient(&self.x, key_prime)?;
        let w = segment_point(&self.x, &x_next, lambda)?;
        let gp_w = problem.sample_gradient(&w, key_prime)?;
        let lip = lipschitz_estimate(&gp_w, &gp_x, &w, &self.x, self.eps_disp)?;
        let coeffs = surrogate_sgd(&gp_w, &g, lip)?;

        // A round that reveals the zero loss carries no information; keep η.
        if coeffs.linear != 0.0 || coeffs.quad != 0.0 {
            self.eta = self.acc.step(coeffs.linear, coeffs.curvature_increment())?;
        }

        let step_length = x_next.distance(&self.x)?;
        self.x = x_next;
        let record = StepRecord {
            step: self.step_count,
            eta_played,
            eta_next: self.eta,
            step_length,
            surrogate: Some((coeffs, eta_played)),
            lipschitz: Some(lip),
            lipschitz_tilde: None,
            grad_evals: 3,
            eta_max: Some(self.acc.eta_range().hi()),
            adgd_bounds: None,
            moved: step_length > 0.0,
        };
        self.step_count += 1;
        Ok(record)
    }
}

impl Optimizer for GalaSgd {
    fn method(&self) -> Method {
        Method::GalaSgd
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
        self.step_with(problem, streams, None)
    }
}
