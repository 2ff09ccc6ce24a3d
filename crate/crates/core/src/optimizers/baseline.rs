use crate::error::Result;
use crate::problems::StochasticProblem;
use crate::rng::RunStreams;
use crate::vector::Vector;

use super::{check_beta, check_eta0, check_start, Method, Optimizer, StepRecord};
use crate::error::GalaError;

/// Fixed-learning-rate reference methods.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BaselineMethod {
    Sgd,
    /// Heavy ball: `buf = μ·buf + g`, `x −= η·buf`.
    SgdMomentum { momentum: f64 },
    /// Adam with bias correction, `ε` added outside the square root.
    Adam { beta1: f64, beta2: f64, eps: f64 },
}

#[derive(Debug, Clone)]
pub struct Baseline {
    x: Vector,
    eta: f64,
    method: BaselineMethod,
    buf: Vector,
    v: Vector,
    step_count: u64,
}

impl Baseline {
    pub fn new(x0: Vector, eta: f64, method: BaselineMethod) -> Result<Self> {
        check_start(&x0)?;
        check_eta0(eta)?;
        match method {
            BaselineMethod::Sgd => {}
            BaselineMethod::SgdMomentum { momentum } => check_beta("momentum", momentum)?,
            BaselineMethod::Adam { beta1, beta2, eps } => {
                check_beta("beta1", beta1)?;
                check_beta("beta2", beta2)?;
                if !(eps >= 0.0) || !eps.is_finite() {
                    return Err(GalaError::invalid("delta_adam", "must be finite and >= 0"));
                }
            }
        }
        let dim = x0.dim();
        Ok(Baseline {
            x: x0,
            eta,
            method,
            buf: Vector::zeros(dim),
            v: Vector::zeros(dim),
            step_count: 0,
        })
    }

    pub fn sgd(x0: Vector, eta: f64) -> Result<Self> {
        Self::new(x0, eta, BaselineMethod::Sgd)
    }

    pub fn buffer(&self) -> &Vector {
        &self.buf
    }

    /// Applies one update with a supplied gradient.
    pub fn apply(&mut self, g: &Vector) -> Result<Vector> {
        let direction = match self.method {
            BaselineMethod::Sgd => g.clone(),
            BaselineMethod::SgdMomentum { momentum } => {
                self.buf.blend(momentum, 1.0, g)?;
                self.buf.clone()
            }
            BaselineMethod::Adam { beta1, beta2, eps } => {
                self.buf.blend(beta1, 1.0 - beta1, g)?;
                self.v.blend(beta2, 1.0 - beta2, &g.map(|a| a * a))?;
                let t = (self.step_count + 1) as i32;
                let c1 = 1.0 - beta1.powi(t);
                let c2 = 1.0 - beta2.powi(t);
                Vector::from(
                    self.buf
                        .iter()
                        .zip(self.v.iter())
                        .map(|(&m, &v)| (m / c1) / ((v / c2).sqrt() + eps))
                        .map(|d| if d.is_nan() { 0.0 } else { d })
                        .collect::<Vec<_>>(),
                )
            }
        };
        let x_next = self.x.plus_scaled(-self.eta, &direction)?;
        x_next.ensure_finite("iterate")?;
        Ok(x_next)
    }
}

impl Optimizer for Baseline {
    fn method(&self) -> Method {
        match self.method {
            BaselineMethod::Sgd => Method::Sgd,
            BaselineMethod::SgdMomentum { .. } => Method::SgdMomentum,
            BaselineMethod::Adam { .. } => Method::Adam,
        }
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
        let g = problem.sample_gradient(&self.x, streams.sample.sample_key())?;
        let x_next = self.apply(&g)?;
        let step_length = x_next.distance(&self.x)?;
        self.x = x_next;
        let record = StepRecord {
            step: self.step_count,
            eta_played: self.eta,
            eta_next: self.eta,
            step_length,
            grad_evals: 1,
            moved: step_length > 0.0,
            ..StepRecord::default()
        };
        self.step_count += 1;
        Ok(record)
    }
}
