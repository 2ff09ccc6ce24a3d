use crate::error::{GalaError, Result};
use crate::problems::StochasticProblem;
use crate::rng::RunStreams;
use crate::vector::Vector;

use super::{check_eta0, check_start, Method, Optimizer, StepRecord};

/// Adaptive gradient descent (stochastic form).
///
/// `η_t = min{ √(1 + α η_{t−1}/η_{t−2}) η_{t−1}, ‖x_t − x_{t−1}‖ / (2‖∇f(x_t;ξ_t) − ∇f(x_{t−1};ξ_t)‖) }`
/// with both gradients on the same batch. The first step is plain SGD with
/// `η₀` and `η_{−1} = η₀`.
#[derive(Debug, Clone)]
pub struct Adgd {
    x: Vector,
    x_prev: Option<Vector>,
    eta: f64,
    eta_prev: f64,
    alpha: f64,
    step_count: u64,
}

impl Adgd {
    pub fn new(x0: Vector, eta0: f64, alpha: f64) -> Result<Self> {
        check_start(&x0)?;
        check_eta0(eta0)?;
        if !(alpha >= 0.0) || !alpha.is_finite() {
            return Err(GalaError::invalid("adgd_alpha", "must be finite and >= 0"));
        }
        Ok(Adgd {
            x: x0,
            x_prev: None,
            eta: eta0,
            eta_prev: eta0,
            alpha,
            step_count: 0,
        })
    }
}

impl Optimizer for Adgd {
    fn method(&self) -> Method {
        Method::Adgd
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
        let mut bounds = None;

        if let Some(x_prev) = &self.x_prev {
            let g_back = problem.sample_gradient(x_prev, key)?;
            evals += 1;
            let ratio = if self.eta_prev > 0.0 {
                self.eta / self.eta_prev
            } else {
                1.0
            };
            let growth = (1.0 + self.alpha * ratio).sqrt() * self.eta;
            let dg = g.distance(&g_back)?;
            let curvature = if dg > 0.0 {
                self.x.distance(x_prev)? / (2.0 * dg)
            } else {
                f64::INFINITY
            };
            self.eta_prev = self.eta;
            self.eta = growth.min(curvature);
            bounds = Some((growth, curvature));
        }

        let eta_played = self.eta;
        let x_next = self.x.plus_scaled(-eta_played, &g)?;
        x_next.ensure_finite("iterate")?;
        let step_length = x_next.distance(&self.x)?;
        self.x_prev = Some(std::mem::replace(&mut self.x, x_next));

        let record = StepRecord {
            step: self.step_count,
            eta_played,
            eta_next: self.eta,
            step_length,
            surrogate: None,
            lipschitz: None,
            lipschitz_tilde: None,
            grad_evals: evals,
            eta_max: None,
            adgd_bounds: bounds,
            moved: step_length > 0.0,
        };
        self.step_count += 1;
        Ok(record)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optimizers::fixtures::{half_square, run};

    #[test]
    fn hand_trace_on_half_square() {
        let p = half_square();
        let mut opt = Adgd::new([1.0].into(), 0.1, 0.02).unwrap();
        let recs = run(&mut opt, &p, 0, 2);
        assert_eq!(recs[0].eta_played, 0.1);
        let (growth, curvature) = recs[1].adgd_bounds.unwrap();
        assert!((curvature - 0.5).abs() < 1e-12);
        assert!((growth - 1.02f64.sqrt() * 0.1).abs() < 1e-15);
        assert!((recs[1].eta_played - 0.1009950).abs() < 1e-7);
    }

    #[test]
    fn zero_alpha_keeps_growth_term_flat() {
        let p = half_square();
        let mut opt = Adgd::new([1.0].into(), 0.1, 0.0).unwrap();
        let recs = run(&mut opt, &p, 0, 2);
        assert_eq!(recs[1].adgd_bounds.unwrap().0, 0.1);
    }

    #[test]
    fn identical_gradients_pick_growth() {
        let p = StochasticProblem::quadratic(&[1e-300], &[1.0], 0.0).unwrap();
        let mut opt = Adgd::new([0.0].into(), 0.1, 0.02).unwrap();
        let recs = run(&mut opt, &p, 0, 3);
        let (growth, curvature) = recs[1].adgd_bounds.unwrap();
        assert_eq!(curvature, f64::INFINITY);
        assert_eq!(recs[1].eta_played, growth);
    }

    #[test]
    fn eta_never_exceeds_either_bound() {
        let p = StochasticProblem::quadratic(&[1.0, 10.0], &[0.0, 1.0], 0.3).unwrap();
        let mut opt = Adgd::new([3.0, 3.0].into(), 1e-3, 0.02).unwrap();
        for r in run(&mut opt, &p, 5, 500).iter().skip(1) {
            let (a, b) = r.adgd_bounds.unwrap();
            assert!(r.eta_played <= a && r.eta_played <= b);
            assert!(r.eta_played > 0.0);
        }
    }
}
