//! One-dimensional online learning over the learning rate.
//!
//! Each optimizer step reveals a convex quadratic surrogate
//! `ℓ(η) = −linear·η + quad·η²`. FTRL with regularizer `(δ/2)η²` plays the
//! clipped minimizer of the running sum, which has the closed form
//! `Σ linear / (δ + Σ 2·quad)`. The accumulators here keep the two sums;
//! callers pass the denominator increment `2·quad` directly.

use crate::error::{GalaError, Result};
use crate::vector::{Interval, Vector};

/// Displacements shorter than this make a local Lipschitz ratio meaningless.
pub const DEFAULT_EPS_DISP: f64 = 1e-12;

/// Default FTRL stability floor δ.
pub const DEFAULT_DELTA: f64 = 1e-8;

/// Coefficients of `ℓ(η) = −linear·η + quad·η²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurrogateCoeffs {
    pub linear: f64,
    pub quad: f64,
}

impl SurrogateCoeffs {
    pub fn new(linear: f64, quad: f64) -> Result<Self> {
        if !linear.is_finite() || !quad.is_finite() {
            return Err(GalaError::NonFinite {
                what: "surrogate coefficients",
            });
        }
        if quad < 0.0 {
            return Err(GalaError::invalid("quad", "surrogate must be convex"));
        }
        Ok(SurrogateCoeffs { linear, quad })
    }

    pub fn zero() -> Self {
        SurrogateCoeffs {
            linear: 0.0,
            quad: 0.0,
        }
    }

    pub fn value(&self, eta: f64) -> f64 {
        -self.linear * eta + self.quad * eta * eta
    }

    /// The amount this loss adds to the FTRL denominator.
    pub fn curvature_increment(&self) -> f64 {
        2.0 * self.quad
    }
}

/// `‖g_at_w − g_at_x‖ / ‖w − x‖`, or 0 when `‖w − x‖ < eps_disp`.
pub fn lipschitz_estimate(
    g_at_w: &Vector,
    g_at_x: &Vector,
    w: &Vector,
    x: &Vector,
    eps_disp: f64,
) -> Result<f64> {
    if !(eps_disp > 0.0) {
        return Err(GalaError::invalid("eps_disp", "must be positive"));
    }
    let disp = w.distance(x)?;
    let dg = g_at_w.distance(g_at_x)?;
    if disp < eps_disp {
        return Ok(0.0);
    }
    Ok(dg / disp)
}

/// Surrogate for the plain SGD step: `linear = ⟨g_at_w, g_at_x⟩`, `quad = lip·‖g_at_x‖²/2`.
pub fn surrogate_sgd(g_at_w: &Vector, g_at_x: &Vector, lip: f64) -> Result<SurrogateCoeffs> {
    if !(lip >= 0.0) {
        return Err(GalaError::invalid("lip", "must be >= 0"));
    }
    SurrogateCoeffs::new(g_at_w.dot(g_at_x)?, 0.5 * lip * g_at_x.norm_sq())
}

/// Weight `8(1−α)/(3α)` on L̃ in the normalized-momentum FTRL denominator.
pub fn momentum_weight(alpha: f64) -> f64 {
    8.0 * (1.0 - alpha) / (3.0 * alpha)
}

/// Surrogate for the normalized momentum step:
/// `linear = ⟨g_at_w, m_unit⟩`, `quad = lip/2 + 4(1−α)·lip_tilde/(3α)`.
pub fn surrogate_normalized(
    g_at_w: &Vector,
    m_unit: &Vector,
    lip: f64,
    lip_tilde: f64,
    alpha: f64,
) -> Result<SurrogateCoeffs> {
    check_alpha(alpha)?;
    if !(lip >= 0.0) || !(lip_tilde >= 0.0) {
        return Err(GalaError::invalid("lip", "Lipschitz estimates must be >= 0"));
    }
    if (m_unit.norm() - 1.0).abs() > 1e-9 {
        return Err(GalaError::invalid("m_unit", "must have unit norm"));
    }
    let quad = 0.5 * lip + 0.5 * momentum_weight(alpha) * lip_tilde;
    SurrogateCoeffs::new(g_at_w.dot(m_unit)?, quad)
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(GalaError::invalid("alpha", format!("{alpha} not in (0, 1]")));
    }
    Ok(())
}

fn check_increment(term: f64) -> Result<()> {
    if !term.is_finite() || term < 0.0 {
        return Err(GalaError::invalid(
            "new_quad_sum_term",
            format!("{term} must be finite and >= 0"),
        ));
    }
    Ok(())
}

/// Closed-form FTRL over quadratic surrogates.
#[derive(Debug, Clone)]
pub struct FtrlAccumulator {
    numer: f64,
    denom: f64,
    delta: f64,
    eta_range: Interval,
    clip_enabled: bool,
    eta: f64,
}

impl FtrlAccumulator {
    /// `eta` is the value returned while the denominator is still zero.
    pub fn new(delta: f64, eta_range: Interval, clip_enabled: bool, eta: f64) -> Result<Self> {
        if !(delta >= 0.0) || !delta.is_finite() {
            return Err(GalaError::invalid("delta", "must be finite and >= 0"));
        }
        Ok(FtrlAccumulator {
            numer: 0.0,
            denom: 0.0,
            delta,
            eta_range,
            clip_enabled,
            eta,
        })
    }

    pub fn numer(&self) -> f64 {
        self.numer
    }

    pub fn denom(&self) -> f64 {
        self.denom
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn eta_range(&self) -> Interval {
        self.eta_range
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// The ratio before clipping, if defined.
    pub fn unclipped(&self) -> Option<f64> {
        let d = self.delta + self.denom;
        (d > 0.0).then(|| self.numer / d)
    }

    /// Folds in one loss and returns the next learning rate.
    pub fn step(&mut self, new_linear: f64, new_quad_sum_term: f64) -> Result<f64> {
        check_increment(new_quad_sum_term)?;
        if !new_linear.is_finite() {
            return Err(GalaError::NonFinite {
                what: "alignment increment",
            });
        }
        self.numer += new_linear;
        self.denom += new_quad_sum_term;
        if let Some(raw) = self.unclipped() {
            self.eta = if self.clip_enabled {
                self.eta_range.clamp(raw)
            } else {
                raw
            };
        }
        Ok(self.eta)
    }
}

/// Optimistic FTRL: like [`FtrlAccumulator`] plus a per-round linear hint
/// that is not folded into the persistent sums.
#[derive(Debug, Clone)]
pub struct OftrlAccumulator {
    numer: f64,
    denom: f64,
    delta: f64,
    eta_range: Interval,
    alpha: f64,
    eta: f64,
}

impl OftrlAccumulator {
    pub fn new(delta: f64, eta_range: Interval, alpha: f64, eta: f64) -> Result<Self> {
        if !(delta >= 0.0) || !delta.is_finite() {
            return Err(GalaError::invalid("delta", "must be finite and >= 0"));
        }
        check_alpha(alpha)?;
        Ok(OftrlAccumulator {
            numer: 0.0,
            denom: 0.0,
            delta,
            eta_range,
            alpha,
            eta,
        })
    }

    pub fn numer(&self) -> f64 {
        self.numer
    }

    pub fn denom(&self) -> f64 {
        self.denom
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn eta_range(&self) -> Interval {
        self.eta_range
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn step(&mut self, new_linear: f64, new_quad_sum_term: f64, hint_linear: f64) -> Result<f64> {
        check_increment(new_quad_sum_term)?;
        if !new_linear.is_finite() || !hint_linear.is_finite() {
            return Err(GalaError::NonFinite {
                what: "alignment increment",
            });
        }
        self.numer += new_linear;
        self.denom += new_quad_sum_term;
        let d = self.delta + self.denom;
        if d > 0.0 {
            self.eta = self.eta_range.clamp((self.numer + hint_linear) / d);
        }
        Ok(self.eta)
    }
}

/// One revealed surrogate loss and the learning rate that was played against it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossRecord {
    pub coeffs: SurrogateCoeffs,
    pub eta_played: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegretResult {
    /// Closed-form best fixed learning rate in hindsight.
    pub best_eta: f64,
    /// Dense-grid minimizer of the same objective.
    pub grid_best_eta: f64,
    pub grid_cell: f64,
    pub regret: f64,
}

/// Regret of the played learning rates against the best fixed η in `eta_range`.
///
/// The comparator is found twice, by the clipped closed form and by a dense
/// grid search; the call fails if the grid finds a strictly better point.
pub fn regret_oracle(records: &[LossRecord], eta_range: Interval, grid_points: usize) -> Result<RegretResult> {
    if records.is_empty() {
        return Err(GalaError::invalid("records", "empty loss sequence"));
    }
    if grid_points < 2 {
        return Err(GalaError::invalid("grid_points", "need at least 2"));
    }
    let lin: f64 = records.iter().map(|r| r.coeffs.linear).sum();
    let quad: f64 = records.iter().map(|r| r.coeffs.quad).sum();
    let total = |eta: f64| -lin * eta + quad * eta * eta;

    let best_eta = if quad > 0.0 {
        eta_range.clamp(lin / (2.0 * quad))
    } else if lin > 0.0 {
        eta_range.hi()
    } else {
        eta_range.lo()
    };

    let (lo, hi) = (eta_range.lo(), eta_range.hi());
    let cell = (hi - lo) / (grid_points - 1) as f64;
    let mut grid_best_eta = lo;
    let mut grid_best = total(lo);
    for k in 1..grid_points {
        let eta = lo + k as f64 * cell;
        let v = total(eta);
        if v < grid_best {
            grid_best = v;
            grid_best_eta = eta;
        }
    }

    let best = total(best_eta);
    if grid_best < best - 1e-9 * (1.0 + best.abs()) {
        return Err(GalaError::Inconsistent(format!(
            "grid minimizer {grid_best_eta} beats closed form {best_eta}"
        )));
    }

    let played: f64 = records.iter().map(|r| r.coeffs.value(r.eta_played)).sum();
    Ok(RegretResult {
        best_eta,
        grid_best_eta,
        grid_cell: cell,
        regret: played - best,
    })
}
