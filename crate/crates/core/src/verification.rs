//! Executable checks of the inequalities and estimator properties the
//! learning-rate analysis rests on.
//!
//! Each checker takes concrete inputs and returns a [`PropertyReport`]; the
//! `*_suite` functions generate the randomized inputs used by the `verify`
//! CLI subcommand and the acceptance tests.

use serde::{Deserialize, Serialize};

use crate::error::{GalaError, Result};
use crate::online_lr::{regret_oracle, LossRecord};
use crate::optimizers::{GalaSgd, Optimizer, StepRecord};
use crate::problems::{segment_point, LogisticSpec, LogisticSynthetic, NoisyQuadratic, NonconvexSine, StochasticProblem};
use crate::rng::{RngStream, RunStreams};
use crate::vector::{Interval, Vector};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub property_name: String,
    pub trials: u64,
    pub violations: u64,
    /// Inputs the property does not apply to.
    #[serde(default)]
    pub skipped: u64,
    /// Smallest slack observed; negative means the bound was broken.
    pub worst_margin: f64,
}

impl PropertyReport {
    fn new(name: &str) -> Self {
        PropertyReport {
            property_name: name.to_string(),
            trials: 0,
            violations: 0,
            skipped: 0,
            worst_margin: f64::INFINITY,
        }
    }

    /// Records one trial with its slack and the tolerance below zero it may use.
    fn observe(&mut self, margin: f64, tolerance: f64) {
        self.trials += 1;
        if !(margin >= -tolerance) {
            self.violations += 1;
        }
        if margin.is_nan() {
            self.worst_margin = f64::NEG_INFINITY;
        } else {
            self.worst_margin = self.worst_margin.min(margin);
        }
    }

    fn finish(mut self) -> Self {
        if !self.worst_margin.is_finite() {
            self.worst_margin = if self.worst_margin == f64::NEG_INFINITY {
                f64::MIN
            } else {
                0.0
            };
        }
        self
    }

    pub fn passed(&self) -> bool {
        self.violations == 0 && self.trials > 0
    }

    /// Merges another report of the same property.
    pub fn absorb(&mut self, other: &PropertyReport) {
        self.trials += other.trials;
        self.violations += other.violations;
        self.skipped += other.skipped;
        self.worst_margin = self.worst_margin.min(other.worst_margin);
    }
}

/// Checks `Σ_t a_t / (δ + Σ_{s≤t} a_s) ≤ log(1 + Σ_t a_t / δ)` for every
/// sequence against every δ.
pub fn check_sum_to_log<'a>(
    sequences: impl IntoIterator<Item = &'a [f64]>,
    deltas: &[f64],
) -> Result<PropertyReport> {
    if deltas.iter().any(|&d| !(d > 0.0)) {
        return Err(GalaError::invalid("deltas", "every delta must be positive"));
    }
    let mut report = PropertyReport::new("sum_to_log");
    for seq in sequences {
        if seq.iter().any(|&a| !(a >= 0.0)) {
            return Err(GalaError::invalid("sequence", "entries must be nonnegative"));
        }
        for &delta in deltas {
            let (lhs, rhs) = sum_to_log_sides(seq, delta);
            report.observe(rhs - lhs, 1e-10 * (1.0 + rhs.abs()));
        }
    }
    Ok(report.finish())
}

/// `(LHS, RHS)` of the sum-to-log inequality.
pub fn sum_to_log_sides(seq: &[f64], delta: f64) -> (f64, f64) {
    let mut running = 0.0;
    let mut lhs = 0.0;
    for &a in seq {
        running += a;
        lhs += a / (delta + running);
    }
    (lhs, (running / delta).ln_1p())
}

/// Checks `⟨g, m/‖m‖⟩ ≥ ‖g‖/3 − (8/3)‖m − g‖` per pair; pairs with `m = 0`
/// are skipped.
pub fn check_normalized_align(pairs: impl IntoIterator<Item = (Vector, Vector)>) -> Result<PropertyReport> {
    let mut report = PropertyReport::new("normalized_align");
    for (grad, m) in pairs {
        let m_norm = m.norm();
        if m_norm == 0.0 {
            report.skipped += 1;
            continue;
        }
        let lhs = grad.dot(&m)? / m_norm;
        let err = m.distance(&grad)?;
        let rhs = grad.norm() / 3.0 - 8.0 * err / 3.0;
        report.observe(lhs - rhs, 1e-10 * (grad.norm() + err));
    }
    Ok(report.finish())
}

/// Monte-Carlo check that `∇F(x + λ(x_next − x))`, `λ ~ U[0,1]`, is unbiased
/// for the path-averaged gradient. Passes per coordinate within 4 standard
/// errors. The problem must be noise-free so only λ is random.
pub fn check_segment_unbiased(
    problem: &StochasticProblem,
    x: &Vector,
    x_next: &Vector,
    draws: usize,
    rng: &mut RngStream,
) -> Result<PropertyReport> {
    if problem.noise_level() != 0.0 {
        return Err(GalaError::invalid("problem", "segment check needs a noise-free problem"));
    }
    if draws < 2 {
        return Err(GalaError::invalid("draws", "need at least 2"));
    }
    let dim = problem.dim();
    let mut sum = vec![0.0; dim];
    let mut sum_sq = vec![0.0; dim];
    for _ in 0..draws {
        let w = segment_point(x, x_next, rng.uniform())?;
        let g = problem.true_gradient(&w)?;
        for (i, &v) in g.iter().enumerate() {
            sum[i] += v;
            sum_sq[i] += v * v;
        }
    }
    let expected = problem.path_average_gradient(x, x_next)?;
    let n = draws as f64;
    let mut report = PropertyReport::new("segment_unbiased");
    for i in 0..dim {
        let mean = sum[i] / n;
        let var = ((sum_sq[i] - n * mean * mean) / (n - 1.0)).max(0.0);
        let se = (var / n).sqrt();
        let slack = 4.0 * se - (mean - expected[i]).abs();
        report.observe(slack, 1e-12 * (1.0 + expected[i].abs()));
    }
    Ok(report.finish())
}

/// Central differences of `F` against the analytic gradient:
/// `|fd_i − g_i| ≤ 1e-6·max(1, |g_i|)`.
pub fn finite_diff_check(problem: &StochasticProblem, x: &Vector, h: f64) -> Result<PropertyReport> {
    if !(h > 0.0) {
        return Err(GalaError::invalid("h", "must be positive"));
    }
    let g = problem.true_gradient(x)?;
    let mut report = PropertyReport::new("finite_diff");
    for i in 0..x.dim() {
        let mut up = x.clone();
        up.as_mut_slice()[i] += h;
        let mut down = x.clone();
        down.as_mut_slice()[i] -= h;
        let fd = (problem.value(&up)? - problem.value(&down)?) / (2.0 * h);
        let bound = 1e-6 * g[i].abs().max(1.0);
        report.observe(bound - (fd - g[i]).abs(), 0.0);
    }
    Ok(report.finish())
}

/// Monte-Carlo check that sample gradients average to the true gradient,
/// within 4 standard errors per coordinate.
pub fn check_gradient_unbiased(
    problem: &StochasticProblem,
    x: &Vector,
    keys: usize,
    rng: &mut RngStream,
) -> Result<PropertyReport> {
    let dim = problem.dim();
    let mut sum = vec![0.0; dim];
    let mut sum_sq = vec![0.0; dim];
    for _ in 0..keys {
        let g = problem.sample_gradient(x, rng.sample_key())?;
        for (i, &v) in g.iter().enumerate() {
            sum[i] += v;
            sum_sq[i] += v * v;
        }
    }
    let truth = problem.true_gradient(x)?;
    let n = keys as f64;
    let mut report = PropertyReport::new("gradient_unbiased");
    for i in 0..dim {
        let mean = sum[i] / n;
        let var = ((sum_sq[i] - n * mean * mean) / (n - 1.0)).max(0.0);
        let se = (var / n).sqrt();
        report.observe(4.0 * se - (mean - truth[i]).abs(), 1e-12 * (1.0 + truth[i].abs()));
    }
    Ok(report.finish())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretCurve {
    pub horizons: Vec<usize>,
    pub regret_at_t: Vec<f64>,
    pub best_eta_at_t: Vec<f64>,
}

impl RegretCurve {
    /// `Reg(T) / T` per horizon.
    pub fn average(&self) -> Vec<f64> {
        self.horizons
            .iter()
            .zip(&self.regret_at_t)
            .map(|(&t, &r)| r / t as f64)
            .collect()
    }
}

/// Regret of the logged learning rates over each prefix length in `horizons`.
pub fn empirical_regret(
    run_log: &[LossRecord],
    horizons: &[usize],
    eta_range: Interval,
    grid_points: usize,
) -> Result<RegretCurve> {
    if run_log.is_empty() {
        return Err(GalaError::invalid("run_log", "empty log"));
    }
    if horizons.windows(2).any(|w| w[0] >= w[1]) {
        return Err(GalaError::invalid("horizons", "must be strictly increasing"));
    }
    let mut curve = RegretCurve {
        horizons: horizons.to_vec(),
        regret_at_t: Vec::with_capacity(horizons.len()),
        best_eta_at_t: Vec::with_capacity(horizons.len()),
    };
    for &t in horizons {
        if t == 0 || t > run_log.len() {
            return Err(GalaError::invalid(
                "horizons",
                format!("{t} outside log length {}", run_log.len()),
            ));
        }
        let r = regret_oracle(&run_log[..t], eta_range, grid_points)?;
        curve.regret_at_t.push(r.regret);
        curve.best_eta_at_t.push(r.best_eta);
    }
    Ok(curve)
}

/// Surrogate losses and played rates from a trajectory.
pub fn loss_records(steps: &[StepRecord]) -> Vec<LossRecord> {
    steps
        .iter()
        .filter_map(|s| s.surrogate)
        .map(|(coeffs, eta_played)| LossRecord { coeffs, eta_played })
        .collect()
}

/// Post-hoc statistics of the local Lipschitz estimates along a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LipschitzStats {
    /// Largest `max(L_t, L̃_t)` observed.
    pub max: f64,
    pub mean: f64,
    pub mean_tilde: Option<f64>,
    /// Smallest running average `Σ_{s≤t} L_s / (t+1)`.
    pub min_running_mean: f64,
}

pub fn lipschitz_stats(steps: &[StepRecord]) -> Option<LipschitzStats> {
    let ls: Vec<f64> = steps.iter().filter_map(|s| s.lipschitz).collect();
    if ls.is_empty() {
        return None;
    }
    let tildes: Vec<f64> = steps.iter().filter_map(|s| s.lipschitz_tilde).collect();
    let max = ls.iter().chain(&tildes).copied().fold(0.0, f64::max);
    let mut running = 0.0;
    let mut min_running_mean = f64::INFINITY;
    for (t, l) in ls.iter().enumerate() {
        running += l;
        min_running_mean = min_running_mean.min(running / (t + 1) as f64);
    }
    Some(LipschitzStats {
        max,
        mean: ls.iter().sum::<f64>() / ls.len() as f64,
        mean_tilde: (!tildes.is_empty()).then(|| tildes.iter().sum::<f64>() / tildes.len() as f64),
        min_running_mean,
    })
}

// ---------------------------------------------------------------------------
// Randomized suites

fn log_uniform(rng: &mut RngStream, lo: f64, hi: f64) -> f64 {
    (lo.ln() + rng.uniform() * (hi.ln() - lo.ln())).exp()
}

fn gaussian(rng: &mut RngStream, dim: usize, scale: f64) -> Vector {
    Vector::from((0..dim).map(|_| scale * rng.standard_normal()).collect::<Vec<_>>())
}

pub const SUM_TO_LOG_DELTAS: [f64; 3] = [1e-3, 1.0, 10.0];

/// Random nonnegative sequences of length 1–1000 with entries spanning
/// 1e-6 to 1e6 (and occasional zeros), checked against δ ∈ {1e-3, 1, 10}.
pub fn sum_to_log_suite(seed: u64, sequences: usize) -> Result<PropertyReport> {
    let mut rng = RngStream::new(seed, 100);
    let seqs: Vec<Vec<f64>> = (0..sequences)
        .map(|_| {
            let len = 1 + rng.index(1000);
            (0..len)
                .map(|_| {
                    if rng.uniform() < 0.05 {
                        0.0
                    } else {
                        log_uniform(&mut rng, 1e-6, 1e6)
                    }
                })
                .collect()
        })
        .collect();
    check_sum_to_log(seqs.iter().map(Vec::as_slice), &SUM_TO_LOG_DELTAS)
}

/// Random `(∇F, m)` pairs in dims {1, 10, 100}; half of the momenta point
/// into the hemisphere opposite the gradient.
pub fn normalized_align_suite(seed: u64, pairs: usize) -> Result<PropertyReport> {
    let mut rng = RngStream::new(seed, 101);
    let dims = [1usize, 10, 100];
    let gen = (0..pairs).map(move |k| {
        let dim = dims[k % dims.len()];
        let scale = log_uniform(&mut rng, 1e-3, 1e3);
        let grad = if rng.uniform() < 0.02 {
            Vector::zeros(dim)
        } else {
            gaussian(&mut rng, dim, scale)
        };
        let c = 2.0 * rng.uniform();
        let sign = if rng.uniform() < 0.5 { -1.0 } else { 1.0 };
        let noise_scale = scale * log_uniform(&mut rng, 1e-3, 10.0);
        let noise = gaussian(&mut rng, dim, noise_scale);
        let m = grad.scaled(sign * c).add(&noise).expect("same dim");
        (grad, m)
    });
    check_normalized_align(gen)
}

/// Random noise-free diagonal quadratics of dimension ≤ 10, each checked
/// with `draws` segment samples.
pub fn segment_unbiased_suite(seed: u64, problems: usize, draws: usize) -> Result<PropertyReport> {
    let mut rng = RngStream::new(seed, 102);
    let mut report = PropertyReport::new("segment_unbiased");
    for _ in 0..problems {
        let dim = 1 + rng.index(10);
        let eig: Vec<f64> = (0..dim).map(|_| log_uniform(&mut rng, 0.1, 10.0)).collect();
        let off = gaussian(&mut rng, dim, 1.0);
        let p: StochasticProblem = NoisyQuadratic::new(eig.into(), off, 0.0)?.into();
        let x = gaussian(&mut rng, dim, 2.0);
        let x_next = gaussian(&mut rng, dim, 2.0);
        report.absorb(&check_segment_unbiased(&p, &x, &x_next, draws, &mut rng)?);
    }
    Ok(report.finish())
}

fn sample_problems(seed: u64) -> Result<Vec<StochasticProblem>> {
    let mut rng = RngStream::new(seed, 103);
    let dim = 6;
    let eig: Vec<f64> = (0..dim).map(|_| log_uniform(&mut rng, 0.1, 10.0)).collect();
    let off = gaussian(&mut rng, dim, 1.0);
    let quad = NoisyQuadratic::new(eig.into(), off, 0.5)?;
    let sine = NonconvexSine::new(quad.clone(), 0.5, 2.0)?;
    let logistic = LogisticSynthetic::generate(&LogisticSpec {
        dim,
        n_samples: 200,
        batch_size: 16,
        data_seed: seed,
        ..LogisticSpec::default()
    })?;
    Ok(vec![quad.into(), sine.into(), logistic.into()])
}

/// Analytic gradients of every problem kind against central differences at
/// random unit-scale points.
pub fn finite_diff_suite(seed: u64, points: usize) -> Result<PropertyReport> {
    let mut rng = RngStream::new(seed, 104);
    let mut report = PropertyReport::new("finite_diff");
    for p in sample_problems(seed)? {
        for _ in 0..points {
            let x = gaussian(&mut rng, p.dim(), 1.0);
            report.absorb(&finite_diff_check(&p, &x, 1e-5)?);
        }
    }
    Ok(report.finish())
}

/// Sample-gradient unbiasedness for every problem kind.
pub fn gradient_unbiased_suite(seed: u64, keys: usize) -> Result<PropertyReport> {
    let mut rng = RngStream::new(seed, 105);
    let mut report = PropertyReport::new("gradient_unbiased");
    for p in sample_problems(seed)? {
        let x = gaussian(&mut rng, p.dim(), 1.0);
        report.absorb(&check_gradient_unbiased(&p, &x, keys, &mut rng)?);
    }
    Ok(report.finish())
}

/// The 1-D noisy quadratic `F(x) = x²/2`, σ = 0.1, used for regret checks.
pub fn regret_reference_problem() -> Result<StochasticProblem> {
    StochasticProblem::quadratic(&[1.0], &[0.0], 0.1)
}

pub const REGRET_HORIZONS: [usize; 3] = [100, 1_000, 10_000];

/// Runs SGD-GALA (x₀ = 1, η₀ = 0.1, δ = 1e-8, η^max = 1) on the regret
/// reference problem for the largest horizon and returns its regret curve.
pub fn gala_sgd_regret_curve(seed: u64) -> Result<(RegretCurve, Vec<StepRecord>)> {
    let p = regret_reference_problem()?;
    let mut opt = GalaSgd::new([1.0].into(), 0.1, 1e-8, 1.0)?;
    let mut streams = RunStreams::new(seed);
    let horizon = *REGRET_HORIZONS.last().unwrap();
    let steps = (0..horizon)
        .map(|_| opt.step(&p, &mut streams))
        .collect::<Result<Vec<_>>>()?;
    let curve = empirical_regret(&loss_records(&steps), &REGRET_HORIZONS, Interval::up_to(1.0)?, 100_000)?;
    Ok((curve, steps))
}

/// `Reg(T_max)/T_max < 0.2 · Reg(T_min)/T_min` on the reference run.
pub fn regret_sublinear_check(seed: u64) -> Result<PropertyReport> {
    let (curve, _) = gala_sgd_regret_curve(seed)?;
    let avg = curve.average();
    let mut report = PropertyReport::new("regret_sublinear");
    let first = avg[0];
    let last = *avg.last().unwrap();
    report.observe(0.2 * first - last, 0.0);
    Ok(report.finish())
}

pub const PROPERTY_NAMES: [&str; 6] = [
    "sum_to_log",
    "normalized_align",
    "segment_unbiased",
    "finite_diff",
    "gradient_unbiased",
    "regret_sublinear",
];

/// Runs one named property at its default size.
pub fn run_property(name: &str, seed: u64) -> Result<PropertyReport> {
    match name {
        "sum_to_log" => sum_to_log_suite(seed, 10_000),
        "normalized_align" => normalized_align_suite(seed, 100_000),
        "segment_unbiased" => segment_unbiased_suite(seed, 20, 100_000),
        "finite_diff" => finite_diff_suite(seed, 20),
        "gradient_unbiased" => gradient_unbiased_suite(seed, 100_000),
        "regret_sublinear" => regret_sublinear_check(seed),
        other => Err(GalaError::invalid(
            "property",
            format!("unknown property `{other}`; expected one of {}", PROPERTY_NAMES.join(", ")),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::online_lr::SurrogateCoeffs;

    #[test]
    fn sum_to_log_examples() {
        let (lhs, rhs) = sum_to_log_sides(&[1.0, 1.0, 1.0], 1.0);
        assert!((lhs - (0.5 + 1.0 / 3.0 + 0.25)).abs() < 1e-15);
        assert!((rhs - 4f64.ln()).abs() < 1e-15);
        let (lhs, rhs) = sum_to_log_sides(&[0.0, 0.0], 2.0);
        assert_eq!((lhs, rhs), (0.0, 0.0));
        let (lhs, rhs) = sum_to_log_sides(&[5.0], 1.0);
        assert!((lhs - 5.0 / 6.0).abs() < 1e-15 && (rhs - 6f64.ln()).abs() < 1e-15);
        let r = check_sum_to_log([&[1.0, 1.0, 1.0][..], &[0.0][..], &[5.0][..]], &[1.0]).unwrap();
        assert!(r.passed());
        assert_eq!(r.trials, 3);
        assert_eq!(r.worst_margin, 0.0);
    }

    #[test]
    fn sum_to_log_rejects_bad_input() {
        assert!(check_sum_to_log([&[-1.0][..]], &[1.0]).is_err());
        assert!(check_sum_to_log([&[1.0][..]], &[0.0]).is_err());
    }

    #[test]
    fn normalized_align_examples() {
        let g: Vector = [1.0, -2.0, 0.5].into();
        let r = check_normalized_align([
            (g.clone(), g.clone()),
            (g.clone(), g.scaled(-1.0)),
            (Vector::zeros(3), g.clone()),
            (g.clone(), Vector::zeros(3)),
        ])
        .unwrap();
        assert_eq!(r.trials, 3);
        assert_eq!(r.skipped, 1);
        assert!(r.passed());
        // m = −g: LHS = −‖g‖, RHS = ‖g‖/3 − 16‖g‖/3 = −5‖g‖, slack 4‖g‖
        let single = check_normalized_align([(g.clone(), g.scaled(-1.0))]).unwrap();
        assert!((single.worst_margin - 4.0 * g.norm()).abs() < 1e-12);
    }

    #[test]
    fn normalized_align_counts_nan_as_violation() {
        let r = check_normalized_align([([f64::NAN].into(), [1.0].into())]).unwrap();
        assert_eq!(r.violations, 1);
    }

    #[test]
    fn segment_examples() {
        let p = StochasticProblem::quadratic(&[1.0], &[0.0], 0.0).unwrap();
        let mut rng = RngStream::new(0, 0);
        let r = check_segment_unbiased(&p, &[1.0].into(), &[0.0].into(), 20_000, &mut rng).unwrap();
        assert!(r.passed(), "{r:?}");
        // x_next = x: zero variance, exact mean.
        let r = check_segment_unbiased(&p, &[0.3].into(), &[0.3].into(), 100, &mut rng).unwrap();
        assert!(r.passed(), "{r:?}");
        let noisy = StochasticProblem::quadratic(&[1.0], &[0.0], 0.1).unwrap();
        assert!(check_segment_unbiased(&noisy, &[1.0].into(), &[0.0].into(), 100, &mut rng).is_err());
    }

    #[test]
    fn segment_check_catches_biased_target() {
        // Against the gradient at x (not the path average) the check must fail.
        let p = StochasticProblem::quadratic(&[1.0], &[0.0], 0.0).unwrap();
        let mut rng = RngStream::new(1, 0);
        let mut sum = 0.0;
        let n = 20_000;
        for _ in 0..n {
            sum += p.true_gradient(&segment_point(&[1.0].into(), &[0.0].into(), rng.uniform()).unwrap()).unwrap()[0];
        }
        assert!((sum / n as f64 - 1.0).abs() > 0.4);
    }

    #[test]
    fn finite_diff_examples() {
        let p = StochasticProblem::quadratic(&[2.0], &[0.0], 0.0).unwrap();
        assert!(finite_diff_check(&p, &[1.0].into(), 1e-5).unwrap().passed());
        assert!(finite_diff_check(&p, &[0.0].into(), 1e-5).unwrap().passed());
        let base = NoisyQuadratic::new([2.0].into(), [0.0].into(), 0.0).unwrap();
        let s: StochasticProblem = NonconvexSine::new(base, 0.0, 3.0).unwrap().into();
        assert!(finite_diff_check(&s, &[1.0].into(), 1e-5).unwrap().passed());
    }

    fn rec(linear: f64, quad: f64, eta: f64) -> LossRecord {
        LossRecord {
            coeffs: SurrogateCoeffs { linear, quad },
            eta_played: eta,
        }
    }

    #[test]
    fn empirical_regret_examples() {
        let unit = Interval::up_to(1.0).unwrap();
        let log = vec![rec(1.0, 1.0, 0.5); 20];
        let c = empirical_regret(&log, &[1, 5, 20], unit, 1001).unwrap();
        assert!(c.regret_at_t.iter().all(|&r| r == 0.0));
        let log = vec![rec(1.0, 1.0, 0.0); 2];
        let c = empirical_regret(&log, &[2], unit, 1001).unwrap();
        assert!((c.regret_at_t[0] - 0.5).abs() < 1e-15);
        assert!(empirical_regret(&[], &[1], unit, 10).is_err());
        assert!(empirical_regret(&log, &[3], unit, 10).is_err());
        assert!(empirical_regret(&log, &[2, 1], unit, 10).is_err());
    }

    #[test]
    fn small_suites_pass() {
        assert!(sum_to_log_suite(3, 200).unwrap().passed());
        assert!(normalized_align_suite(3, 3000).unwrap().passed());
        assert!(segment_unbiased_suite(3, 3, 20_000).unwrap().passed());
        assert!(finite_diff_suite(3, 3).unwrap().passed());
        assert!(gradient_unbiased_suite(3, 20_000).unwrap().passed());
    }

    #[test]
    fn unknown_property_is_an_error() {
        assert!(run_property("no_such_property", 0).is_err());
    }

    #[test]
    fn lipschitz_stats_from_records() {
        let steps = vec![
            StepRecord { lipschitz: Some(1.0), lipschitz_tilde: Some(3.0), ..Default::default() },
            StepRecord { lipschitz: Some(2.0), lipschitz_tilde: Some(1.0), ..Default::default() },
        ];
        let s = lipschitz_stats(&steps).unwrap();
        assert_eq!(s.max, 3.0);
        assert_eq!(s.mean, 1.5);
        assert_eq!(s.mean_tilde, Some(2.0));
        assert_eq!(s.min_running_mean, 1.0);
        assert!(lipschitz_stats(&[StepRecord::default()]).is_none());
    }
}
