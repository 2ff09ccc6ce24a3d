//! The reference problems and sweep used by the acceptance suite and the
//! examples.

use crate::error::Result;
use crate::problems::{NoisyQuadratic, NonconvexSine, StochasticProblem};
use crate::vector::Vector;

use super::config::SweepConfig;

/// Initial learning rates of the robustness sweep.
pub const ROBUSTNESS_ETA0: [f64; 7] = [1.0, 1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-8];

/// Plain SGD against practical SGD-GALA on separable synthetic logistic
/// regression (dim 20, 1000 samples, batch 32), three seeds, 2000 steps.
pub const ROBUSTNESS_SWEEP: &str = r#"
eta0 = [1.0, 1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-8]
seeds = [0, 1, 2]
steps = 2000
log_every = 20

[problem]
kind = "logistic"
dim = 20
n_samples = 1000
batch_size = 32
label_noise = 0.0
data_seed = 0

[[optimizers]]
name = "sgd"

[[optimizers]]
name = "gala_sgd_heuristic"
"#;

pub fn robustness_sweep() -> SweepConfig {
    SweepConfig::from_toml_str(ROBUSTNESS_SWEEP).expect("reference sweep config is valid")
}

/// `Σ λᵢxᵢ²/2 + 0.5·sin(2xᵢ)` with `λ` evenly spaced in `[0.5, 2]`, dim 10,
/// σ = 0.1. Nonconvex because `aω² = 2 > λ_min`.
pub fn nonconvex_sine() -> Result<StochasticProblem> {
    let dim = 10;
    let eig: Vec<f64> = (0..dim).map(|i| 0.5 + 1.5 * i as f64 / (dim - 1) as f64).collect();
    let base = NoisyQuadratic::new(eig.into(), Vector::zeros(dim), 0.1)?;
    Ok(NonconvexSine::new(base, 0.5, 2.0)?.into())
}
