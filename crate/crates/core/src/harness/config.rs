//! TOML experiment configuration.
//!
//! A run config names one problem and one optimizer:
//!
//! ```toml
//! eta0 = 0.1
//! steps = 1000
//! seed = 0
//! log_every = 10
//! # x0 = [1.0]        # optional; defaults to the problem's start point
//!
//! [problem]
//! kind = "quadratic"  # quadratic | logistic | nonconvex_sine
//! eigenvalues = [1.0]
//! noise_level = 0.1
//!
//! [optimizer]
//! name = "gala_sgd"   # plus that optimizer's hyperparameters
//! eta_max = 1.0
//! ```
//!
//! A sweep config has the same problem table, lists `eta0` and `seeds`, and
//! an `[[optimizers]]` array. Unknown keys are rejected everywhere, and
//! hyperparameters that do not belong to the chosen optimizer count as
//! unknown.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{GalaError, Result};
use crate::online_lr::DEFAULT_DELTA;
use crate::optimizers::{
    AdamGala, Adgd, Baseline, BaselineMethod, CurvatureNorm, GalaSgd, HeuristicGala, Method, NsgdGala, Optimizer,
    DEFAULT_ADGD_ALPHA, DEFAULT_BETA1, DEFAULT_BETA2, DEFAULT_DELTA_ADAM, DEFAULT_ETA_BAR, DEFAULT_ETA_MAX,
    DEFAULT_MOMENTUM, DEFAULT_NSGD_ALPHA,
};
use crate::problems::{LogisticSpec, LogisticSynthetic, NoisyQuadratic, NonconvexSine, StochasticProblem};
use crate::vector::Vector;

/// Environment variable holding the default sweep worker count.
pub const WORKERS_ENV: &str = "GALA_WORKERS";

fn default_log_every() -> u64 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProblemConfig {
    Quadratic {
        eigenvalues: Vec<f64>,
        /// Defaults to the origin.
        #[serde(default)]
        offset: Option<Vec<f64>>,
        #[serde(default)]
        noise_level: f64,
    },
    Logistic {
        #[serde(default = "LogisticConfigDefaults::dim")]
        dim: usize,
        #[serde(default = "LogisticConfigDefaults::n_samples")]
        n_samples: usize,
        #[serde(default = "LogisticConfigDefaults::batch_size")]
        batch_size: usize,
        #[serde(default = "LogisticConfigDefaults::label_noise")]
        label_noise: f64,
        #[serde(default)]
        noise_level: f64,
        #[serde(default)]
        data_seed: u64,
    },
    NonconvexSine {
        eigenvalues: Vec<f64>,
        #[serde(default)]
        offset: Option<Vec<f64>>,
        amplitude: f64,
        frequency: f64,
        #[serde(default)]
        noise_level: f64,
    },
}

struct LogisticConfigDefaults;

impl LogisticConfigDefaults {
    fn dim() -> usize {
        LogisticSpec::default().dim
    }
    fn n_samples() -> usize {
        LogisticSpec::default().n_samples
    }
    fn batch_size() -> usize {
        LogisticSpec::default().batch_size
    }
    fn label_noise() -> f64 {
        LogisticSpec::default().label_noise
    }
}

fn quadratic_parts(eigenvalues: &[f64], offset: &Option<Vec<f64>>, noise_level: f64) -> Result<NoisyQuadratic> {
    let offset = offset.clone().unwrap_or_else(|| vec![0.0; eigenvalues.len()]);
    NoisyQuadratic::new(eigenvalues.to_vec().into(), offset.into(), noise_level)
}

impl ProblemConfig {
    pub fn build(&self) -> Result<StochasticProblem> {
        let built: Result<StochasticProblem> = match self {
            ProblemConfig::Quadratic {
                eigenvalues,
                offset,
                noise_level,
            } => quadratic_parts(eigenvalues, offset, *noise_level).map(Into::into),
            ProblemConfig::Logistic {
                dim,
                n_samples,
                batch_size,
                label_noise,
                noise_level,
                data_seed,
            } => LogisticSynthetic::generate(&LogisticSpec {
                dim: *dim,
                n_samples: *n_samples,
                batch_size: *batch_size,
                label_noise: *label_noise,
                noise_level: *noise_level,
                data_seed: *data_seed,
            })
            .map(Into::into),
            ProblemConfig::NonconvexSine {
                eigenvalues,
                offset,
                amplitude,
                frequency,
                noise_level,
            } => quadratic_parts(eigenvalues, offset, *noise_level)
                .and_then(|q| NonconvexSine::new(q, *amplitude, *frequency))
                .map(Into::into),
        };
        built.map_err(|e| prefix_field("problem", e))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurvatureNormConfig {
    #[default]
    Direction,
    Gradient,
}

/// One optimizer with its hyperparameters; every field has a default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum OptimizerConfig {
    GalaSgd {
        #[serde(default = "d::delta")]
        delta: f64,
        #[serde(default = "d::eta_max")]
        eta_max: f64,
    },
    NsgdGala {
        #[serde(default = "d::delta")]
        delta: f64,
        #[serde(default = "d::alpha")]
        alpha: f64,
        #[serde(default = "d::eta_bar")]
        eta_bar: f64,
    },
    GalaSgdHeuristic {
        #[serde(default)]
        eta_floor: f64,
    },
    AdamGala {
        #[serde(default = "d::beta1")]
        beta1: f64,
        #[serde(default = "d::beta2")]
        beta2: f64,
        #[serde(default = "d::delta_adam")]
        delta_adam: f64,
        #[serde(default)]
        eta_floor: f64,
        #[serde(default)]
        curvature_norm: CurvatureNormConfig,
    },
    Adgd {
        #[serde(default = "d::adgd_alpha")]
        adgd_alpha: f64,
    },
    Sgd {},
    SgdMomentum {
        #[serde(default = "d::momentum")]
        momentum: f64,
    },
    Adam {
        #[serde(default = "d::beta1")]
        beta1: f64,
        #[serde(default = "d::beta2")]
        beta2: f64,
        #[serde(default = "d::delta_adam")]
        delta_adam: f64,
    },
}

/// Serde default hooks.
mod d {
    use super::*;
    pub fn delta() -> f64 {
        DEFAULT_DELTA
    }
    pub fn eta_max() -> f64 {
        DEFAULT_ETA_MAX
    }
    pub fn alpha() -> f64 {
        DEFAULT_NSGD_ALPHA
    }
    pub fn eta_bar() -> f64 {
        DEFAULT_ETA_BAR
    }
    pub fn beta1() -> f64 {
        DEFAULT_BETA1
    }
    pub fn beta2() -> f64 {
        DEFAULT_BETA2
    }
    pub fn delta_adam() -> f64 {
        DEFAULT_DELTA_ADAM
    }
    pub fn adgd_alpha() -> f64 {
        DEFAULT_ADGD_ALPHA
    }
    pub fn momentum() -> f64 {
        DEFAULT_MOMENTUM
    }
}

impl OptimizerConfig {
    /// The optimizer with every hyperparameter at its default.
    pub fn default_for(method: Method) -> Self {
        let name = method.as_str();
        toml::from_str(&format!("name = \"{name}\"")).expect("every optimizer has full defaults")
    }

    pub fn method(&self) -> Method {
        match self {
            OptimizerConfig::GalaSgd { .. } => Method::GalaSgd,
            OptimizerConfig::NsgdGala { .. } => Method::NsgdGala,
            OptimizerConfig::GalaSgdHeuristic { .. } => Method::GalaSgdHeuristic,
            OptimizerConfig::AdamGala { .. } => Method::AdamGala,
            OptimizerConfig::Adgd { .. } => Method::Adgd,
            OptimizerConfig::Sgd {} => Method::Sgd,
            OptimizerConfig::SgdMomentum { .. } => Method::SgdMomentum,
            OptimizerConfig::Adam { .. } => Method::Adam,
        }
    }

    /// Upper clip on the learning rate for the clipped variants.
    pub fn eta_cap(&self) -> Option<f64> {
        match self {
            OptimizerConfig::GalaSgd { eta_max, .. } => Some(*eta_max),
            OptimizerConfig::NsgdGala { alpha, eta_bar, .. } => Some(alpha.sqrt() * eta_bar),
            _ => None,
        }
    }

    pub fn build(&self, x0: Vector, eta0: f64) -> Result<Box<dyn Optimizer>> {
        let built: Result<Box<dyn Optimizer>> = match *self {
            OptimizerConfig::GalaSgd { delta, eta_max } => {
                GalaSgd::new(x0, eta0, delta, eta_max).map(|o| Box::new(o) as _)
            }
            OptimizerConfig::NsgdGala { delta, alpha, eta_bar } => {
                NsgdGala::new(x0, eta0, alpha, eta_bar, delta).map(|o| Box::new(o) as _)
            }
            OptimizerConfig::GalaSgdHeuristic { eta_floor } => {
                HeuristicGala::new(x0, eta0, eta_floor).map(|o| Box::new(o) as _)
            }
            OptimizerConfig::AdamGala {
                beta1,
                beta2,
                delta_adam,
                eta_floor,
                curvature_norm,
            } => {
                let norm = match curvature_norm {
                    CurvatureNormConfig::Direction => CurvatureNorm::Direction,
                    CurvatureNormConfig::Gradient => CurvatureNorm::Gradient,
                };
                AdamGala::new(x0, eta0, beta1, beta2, delta_adam, eta_floor, norm).map(|o| Box::new(o) as _)
            }
            OptimizerConfig::Adgd { adgd_alpha } => Adgd::new(x0, eta0, adgd_alpha).map(|o| Box::new(o) as _),
            OptimizerConfig::Sgd {} => Baseline::new(x0, eta0, BaselineMethod::Sgd).map(|o| Box::new(o) as _),
            OptimizerConfig::SgdMomentum { momentum } => {
                Baseline::new(x0, eta0, BaselineMethod::SgdMomentum { momentum }).map(|o| Box::new(o) as _)
            }
            OptimizerConfig::Adam {
                beta1,
                beta2,
                delta_adam,
            } => Baseline::new(
                x0,
                eta0,
                BaselineMethod::Adam {
                    beta1,
                    beta2,
                    eps: delta_adam,
                },
            )
            .map(|o| Box::new(o) as _),
        };
        built.map_err(|e| match e {
            GalaError::InvalidArgument { name: "eta0", reason } => GalaError::Config {
                field: "eta0".into(),
                reason,
            },
            GalaError::InvalidArgument { name: "x0", reason } => GalaError::Config {
                field: "x0".into(),
                reason,
            },
            other => prefix_field("optimizer", other),
        })
    }
}

/// Turns constructor argument errors into config errors under `section`.
fn prefix_field(section: &str, e: GalaError) -> GalaError {
    match e {
        GalaError::InvalidArgument { name, reason } => GalaError::Config {
            field: format!("{section}.{name}"),
            reason,
        },
        GalaError::DimensionMismatch { expected, got } => GalaError::Config {
            field: section.to_string(),
            reason: format!("dimension mismatch: expected {expected}, got {got}"),
        },
        GalaError::NonFinite { what } => GalaError::Config {
            field: section.to_string(),
            reason: format!("non-finite value in {what}"),
        },
        other => other,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemConfig,
    pub optimizer: OptimizerConfig,
    pub eta0: f64,
    pub steps: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_log_every")]
    pub log_every: u64,
    #[serde(default)]
    pub x0: Option<Vec<f64>>,
    /// Adds a `held_out_loss` column (logistic problems only).
    #[serde(default)]
    pub held_out: bool,
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: RunConfig = parse_toml(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_toml_str(&read_text(path)?)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("run configs always serialize")
    }

    /// Checks every field, building the problem and optimizer once.
    pub fn validate(&self) -> Result<()> {
        validate_scalars(self.eta0, self.log_every)?;
        let problem = self.problem.build()?;
        if self.held_out && !matches!(self.problem, ProblemConfig::Logistic { .. }) {
            return Err(GalaError::Config {
                field: "held_out".into(),
                reason: "only logistic problems have a held-out set".into(),
            });
        }
        let x0 = self.start_point(&problem)?;
        self.optimizer.build(x0, self.eta0)?;
        Ok(())
    }

    pub fn start_point(&self, problem: &StochasticProblem) -> Result<Vector> {
        match &self.x0 {
            None => Ok(problem.default_start()),
            Some(x0) if x0.len() != problem.dim() => Err(GalaError::Config {
                field: "x0".into(),
                reason: format!("has {} entries, problem dimension is {}", x0.len(), problem.dim()),
            }),
            Some(x0) => Ok(x0.clone().into()),
        }
    }
}

fn validate_scalars(eta0: f64, log_every: u64) -> Result<()> {
    if !(eta0 > 0.0) || !eta0.is_finite() {
        return Err(GalaError::Config {
            field: "eta0".into(),
            reason: format!("{eta0} must be finite and > 0"),
        });
    }
    if log_every == 0 {
        return Err(GalaError::Config {
            field: "log_every".into(),
            reason: "must be positive".into(),
        });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub problem: ProblemConfig,
    pub optimizers: Vec<OptimizerConfig>,
    pub eta0: Vec<f64>,
    pub seeds: Vec<u64>,
    pub steps: u64,
    #[serde(default = "default_log_every")]
    pub log_every: u64,
    #[serde(default)]
    pub x0: Option<Vec<f64>>,
    #[serde(default)]
    pub held_out: bool,
    /// Parallel cells; falls back to `GALA_WORKERS`, then to the core count.
    #[serde(default)]
    pub workers: Option<usize>,
}

impl SweepConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: SweepConfig = parse_toml(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_toml_str(&read_text(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        for (field, empty) in [
            ("optimizers", self.optimizers.is_empty()),
            ("eta0", self.eta0.is_empty()),
            ("seeds", self.seeds.is_empty()),
        ] {
            if empty {
                return Err(GalaError::Config {
                    field: field.into(),
                    reason: "must not be empty".into(),
                });
            }
        }
        let mut names: Vec<Method> = self.optimizers.iter().map(OptimizerConfig::method).collect();
        names.sort();
        if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
            return Err(GalaError::Config {
                field: "optimizers".into(),
                reason: format!("`{}` listed twice; output directories are keyed by name", w[0]),
            });
        }
        if self.workers == Some(0) {
            return Err(GalaError::Config {
                field: "workers".into(),
                reason: "must be positive".into(),
            });
        }
        for &eta0 in &self.eta0 {
            validate_scalars(eta0, self.log_every)?;
        }
        // Every cell shares problem and start point; checking one run per
        // optimizer covers all hyperparameters.
        for optimizer in &self.optimizers {
            self.cell(optimizer.clone(), self.eta0[0], self.seeds[0]).validate()?;
        }
        Ok(())
    }

    /// The run config of one sweep cell.
    pub fn cell(&self, optimizer: OptimizerConfig, eta0: f64, seed: u64) -> RunConfig {
        RunConfig {
            problem: self.problem.clone(),
            optimizer,
            eta0,
            steps: self.steps,
            seed,
            log_every: self.log_every,
            x0: self.x0.clone(),
            held_out: self.held_out,
        }
    }

    /// Worker count: config, then `GALA_WORKERS`, then available cores.
    pub fn resolved_workers(&self) -> Result<usize> {
        if let Some(w) = self.workers {
            return Ok(w);
        }
        match std::env::var(WORKERS_ENV) {
            Ok(v) => v.trim().parse::<usize>().ok().filter(|&w| w > 0).ok_or_else(|| GalaError::Config {
                field: WORKERS_ENV.into(),
                reason: format!("`{v}` is not a positive integer"),
            }),
            Err(_) => Ok(std::thread::available_parallelism().map_or(1, usize::from)),
        }
    }
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| GalaError::io(path, e))
}

fn parse_toml<T: serde::de::DeserializeOwned>(text: &str) -> Result<T> {
    toml::from_str(text).map_err(|e| {
        let reason = e.message().to_string();
        let field = offending_field(&reason, text, e.span()).unwrap_or_else(|| "<document>".to_string());
        GalaError::Config { field, reason }
    })
}

/// Best-effort name of the key a TOML error refers to: a backquoted name in
/// the message, else the key on the line where the error span starts.
fn offending_field(message: &str, text: &str, span: Option<std::ops::Range<usize>>) -> Option<String> {
    for marker in ["unknown field `", "missing field `", "unknown variant `"] {
        if let Some(start) = message.find(marker) {
            let rest = &message[start + marker.len()..];
            if let Some(end) = rest.find('`') {
                return Some(rest[..end].to_string());
            }
        }
    }
    let pos = span?.start.min(text.len());
    let line_start = text[..pos].rfind('\n').map_or(0, |i| i + 1);
    let line = text[line_start..].lines().next()?;
    let key = line.split('=').next()?.trim().trim_matches(|c| c == '[' || c == ']').trim();
    (!key.is_empty()).then(|| key.to_string())
}
