use crate::error::{GalaError, Result};
use crate::online_lr::{lipschitz_estimate, SurrogateCoeffs, DEFAULT_EPS_DISP};
use crate::problems::StochasticProblem;
use crate::rng::RunStreams;
use crate::vector::Vector;

use super::{check_beta, check_eta0, check_start, Method, Optimizer, StepRecord};

/// Which squared norm multiplies `L_t` in the Adam-GALA denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CurvatureNorm {
    /// `‖d_t‖²`, the Adam direction.
    #[default]
    Direction,
    /// `‖∇f(x_t; ξ_t)‖²`.
    Gradient,
}

/// Adam (no bias correction) with a GALA learning rate.
///
/// At iteration t ≥ 1 the batch ξ_t is evaluated at `x_t` and `x_{t−1}`; the
/// second evaluation only feeds `L_t`. The direction `d_t = m_t/√(δ + v_t)`
/// contributes `⟨d_t, ∇f(x_t; ξ_t)⟩` to the numerator and `L_t‖d_t‖²` to the
/// denominator. The resulting rate is floored, not clipped above, and is used
/// for the step from `x_t`.
#[derive(Debug, Clone)]
pub struct AdamGala {
    x: Vector,
    x_prev: Option<Vector>,
    m: Vector,
    v: Vector,
    d_prev: Vector,
    beta1: f64,
    beta2: f64,
    delta_adam: f64,
    eta: f64,
    numer: f64,
    denom: f64,
    eta_floor: f64,
    curvature_norm: CurvatureNorm,
    step_count: u64,
    eps_disp: f64,
}

impl AdamGala {
    pub fn new(
        x0: Vector,
        eta0: f64,
        beta1: f64,
        beta2: f64,
        delta_adam: f64,
        eta_floor: f64,
        curvature_norm: CurvatureNorm,
    ) -> Result<Self> {
        check_start(&x0)?;
        check_eta0(eta0)?;
        check_beta("beta1", beta1)?;
        check_beta("beta2", beta2)?;
        if !(delta_adam >= 0.0) || !delta_adam.is_finite() {
            return Err(GalaError::invalid("delta_adam", "must be finite and >= 0"));
        }
        if !eta_floor.is_finite() {
            return Err(GalaError::invalid("eta_floor", "must be finite"));
        }
        let dim = x0.dim();
        Ok(AdamGala {
            x: x0,
            x_prev: None,
            m: Vector::zeros(dim),
            v: Vector::zeros(dim),
            d_prev: Vector::zeros(dim),
            beta1,
            beta2,
            delta_adam,
            eta: eta0,
            numer: 0.0,
            denom: 0.0,
            eta_floor,
            curvature_norm,
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

    /// The last Adam direction.
    pub fn direction(&self) -> &Vector {
        &self.d_prev
    }

    fn direction_from_moments(&self) -> Vector {
        let d: Vec<f64> = self
            .m
            .iter()
            .zip(self.v.iter())
            .map(|(&m, &v)| {
                let s = (self.delta_adam + v).sqrt();
                if s > 0.0 {
                    m / s
                } else {
                    0.0
                }
            })
            .collect();
        Vector::from(d)
    }
}

impl Optimizer for AdamGala {
    fn method(&self) -> Method {
        Method::AdamGala
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

        let lip = match &self.x_prev {
            Some(x_prev) => {
                let g_back = problem.sample_gradient(x_prev, key)?;
                evals += 1;
                Some(lipschitz_estimate(&g, &g_back, &self.x, x_prev, self.eps_disp)?)
            }
            None => None,
        };

        self.m.blend(self.beta1, 1.0 - self.beta1, &g)?;
        let g_sq = g.map(|a| a * a);
        self.v.blend(self.beta2, 1.0 - self.beta2, &g_sq)?;
        let d = self.direction_from_moments();

        let mut surrogate = None;
        if let Some(lip) = lip {
            let linear = d.dot(&g)?;
            let norm_sq = match self.curvature_norm {
                CurvatureNorm::Direction => d.norm_sq(),
                CurvatureNorm::Gradient => g.norm_sq(),
            };
            let curvature = lip * norm_sq;
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
        }

        let eta_played = self.eta;
        let x_next = self.x.plus_scaled(-eta_played, &d)?;
        x_next.ensure_finite("iterate")?;
        let step_length = x_next.distance(&self.x)?;
        self.x_prev = Some(std::mem::replace(&mut self.x, x_next));
        self.d_prev = d;

        let record = StepRecord {
            step: self.step_count,
            eta_played,
            eta_next: self.eta,
            step_length,
            surrogate,
            lipschitz: lip,
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
