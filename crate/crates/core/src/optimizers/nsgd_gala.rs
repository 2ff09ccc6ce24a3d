use crate::error::{GalaError, Result};
use crate::online_lr::{
    check_alpha, lipschitz_estimate, surrogate_normalized, OftrlAccumulator, SurrogateCoeffs,
    DEFAULT_EPS_DISP,
};
use crate::problems::{segment_point, StochasticProblem};
use crate::rng::RunStreams;
use crate::vector::{Interval, Vector};

use super::{check_eta0, check_start, Method, Optimizer, StepRecord};

/// Normalized SGD with momentum, `x_{t+1} = x_t − η_t m_t/‖m_t‖`, with the
/// learning rate chosen by optimistic FTRL.
///
/// The hint for round t is `⟨g_{t+1}(x_{t+1}), m_{t+1}/‖m_{t+1}‖⟩`, so each
/// round ends by sampling the next gradient and folding it into the momentum.
/// Those are carried into the next round rather than recomputed.
#[derive(Debug, Clone)]
pub struct NsgdGala {
    x: Vector,
    /// `m_t`, present once the first gradient has been drawn.
    m: Option<Vector>,
    eta: f64,
    alpha: f64,
    eta_bar: f64,
    acc: OftrlAccumulator,
    step_count: u64,
    eps_disp: f64,
}

impl NsgdGala {
    /// `eta_max = √alpha · eta_bar`.
    pub fn new(x0: Vector, eta0: f64, alpha: f64, eta_bar: f64, delta: f64) -> Result<Self> {
        check_start(&x0)?;
        check_eta0(eta0)?;
        check_alpha(alpha)?;
        if !(eta_bar > 0.0) || !eta_bar.is_finite() {
            return Err(GalaError::invalid("eta_bar", "must be finite and positive"));
        }
        let range = Interval::up_to(alpha.sqrt() * eta_bar)?;
        Ok(NsgdGala {
            x: x0,
            m: None,
            eta: eta0,
            alpha,
            eta_bar,
            acc: OftrlAccumulator::new(delta, range, alpha, eta0)?,
            step_count: 0,
            eps_disp: DEFAULT_EPS_DISP,
        })
    }

    pub fn eta_max(&self) -> f64 {
        self.acc.eta_range().hi()
    }

    pub fn eta_bar(&self) -> f64 {
        self.eta_bar
    }

    pub fn momentum(&self) -> Option<&Vector> {
        self.m.as_ref()
    }

    pub fn accumulator(&self) -> &OftrlAccumulator {
        &self.acc
    }

    fn unit(&self, v: &Vector) -> Option<Vector> {
        let n = v.norm();
        (n >= self.eps_disp).then(|| v.scaled(1.0 / n))
    }
}

impl Optimizer for NsgdGala {
    fn method(&self) -> Method {
        Method::NsgdGala
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
        let mut evals = 0;
        let m = match self.m.take() {
            Some(m) => m,
            None => {
                evals += 1;
                problem.sample_gradient(&self.x, streams.sample.sample_key())?
            }
        };
        let m_unit = self.unit(&m);
        let eta_played = self.eta;
        let x_next = match &m_unit {
            Some(u) => self.x.plus_scaled(-eta_played, u)?,
            None => self.x.clone(),
        };
        x_next.ensure_finite("iterate")?;

        let key_prime = streams.sample_prime.sample_key();
        let lambda = streams.segment.uniform();
        let gp_x = problem.sample_gradient(&self.x, key_prime)?;
        let w = segment_point(&self.x, &x_next, lambda)?;
        let gp_w = problem.sample_gradient(&w, key_prime)?;
        let gp_next = problem.sample_gradient(&x_next, key_prime)?;
        evals += 3;
        let lip = lipschitz_estimate(&gp_w, &gp_x, &w, &self.x, self.eps_disp)?;
        let lip_tilde = lipschitz_estimate(&gp_next, &gp_x, &x_next, &self.x, self.eps_disp)?;
        let coeffs = match &m_unit {
            Some(u) => surrogate_normalized(&gp_w, u, lip, lip_tilde, self.alpha)?,
            None => SurrogateCoeffs::zero(),
        };

        // Next round's gradient and momentum double as this round's hint.
        let g_next = problem.sample_gradient(&x_next, streams.sample.sample_key())?;
        evals += 1;
        let mut m_next = m;
        m_next.blend(1.0 - self.alpha, self.alpha, &g_next)?;
        let hint = match self.unit(&m_next) {
            Some(u) => g_next.dot(&u)?,
            None => 0.0,
        };
        self.eta = self.acc.step(coeffs.linear, coeffs.curvature_increment(), hint)?;

        let step_length = x_next.distance(&self.x)?;
        self.x = x_next;
        self.m = Some(m_next);
        let record = StepRecord {
            step: self.step_count,
            eta_played,
            eta_next: self.eta,
            step_length,
            surrogate: Some((coeffs, eta_played)),
            lipschitz: Some(lip),
            lipschitz_tilde: Some(lip_tilde),
            grad_evals: evals,
            eta_max: Some(self.eta_max()),
            adgd_bounds: None,
            moved: m_unit.is_some(),
        };
        self.step_count += 1;
        Ok(record)
    }
}
