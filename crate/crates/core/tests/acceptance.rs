//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the lines are always printed; the
//! process exits nonzero if any criterion fails.

use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use gala::harness::{check_step_invariants, reference, run_sweep, SweepResult};
use gala::online_lr::{FtrlAccumulator, OftrlAccumulator};
use gala::optimizers::{Adgd, GalaSgd, HeuristicGala, Method, NsgdGala, Optimizer, StepRecord};
use gala::problems::StochasticProblem;
use gala::rng::{RngStream, RunStreams};
use gala::verification::{
    gala_sgd_regret_curve, normalized_align_suite, segment_unbiased_suite, sum_to_log_suite, PropertyReport,
};
use gala::{Interval, Vector};

/// Invariant breaches collected from every optimizer step the suite runs.
#[derive(Default)]
struct InvariantLog {
    steps: u64,
    violations: Vec<String>,
}

impl InvariantLog {
    fn observe(&mut self, method: Method, eta_cap: Option<f64>, rec: &StepRecord) {
        self.steps += 1;
        if let Some(v) = check_step_invariants(method, eta_cap, rec) {
            self.violations.push(format!("{method}: {v}"));
        }
    }

    fn step(&mut self, opt: &mut dyn Optimizer, cap: Option<f64>, p: &StochasticProblem, s: &mut RunStreams) -> StepRecord {
        let rec = opt.step(p, s).expect("acceptance runs stay finite");
        self.observe(opt.method(), cap, &rec);
        rec
    }
}

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn within_budget(elapsed: Duration, limit_secs: u64) -> bool {
    elapsed <= Duration::from_secs(limit_secs)
}

/// Dense-grid argmin of `η ↦ −a·η + b·η²` on `[0, hi]`.
fn grid_argmin(a: f64, b: f64, hi: f64, points: usize) -> (f64, f64) {
    let cell = hi / (points - 1) as f64;
    let mut best = (0.0, 0.0);
    for k in 1..points {
        let eta = k as f64 * cell;
        let v = -a * eta + b * eta * eta;
        if v < best.1 {
            best = (eta, v);
        }
    }
    (best.0, cell)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = RngStream::new(1, 0);
    let points = 100_001;
    let (mut checks, mut worst) = (0u64, 0.0f64);
    let mut failures = 0;
    for _ in 0..100 {
        let hi = 0.1 + 2.0 * rng.uniform();
        let delta = 0.01 + rng.uniform();
        let alpha = 0.05 + 0.95 * rng.uniform();
        let range = Interval::up_to(hi).unwrap();
        let mut ftrl = FtrlAccumulator::new(delta, range, true, 0.0).unwrap();
        let mut oftrl = OftrlAccumulator::new(delta, range, alpha, 0.0).unwrap();
        let (mut lin, mut quad) = (0.0, 0.0);
        for _ in 0..50 {
            let a = rng.standard_normal();
            let b = rng.uniform();
            let hint = rng.standard_normal();
            lin += a;
            quad += b;
            let f = ftrl.step(a, 2.0 * b).unwrap();
            let o = oftrl.step(a, 2.0 * b, hint).unwrap();
            // FTRL minimizes Σℓ + (δ/2)η²; OFTRL adds −hint·η.
            let (gf, cell) = grid_argmin(lin, quad + delta / 2.0, hi, points);
            let (go, _) = grid_argmin(lin + hint, quad + delta / 2.0, hi, points);
            for err in [(f - gf).abs(), (o - go).abs()] {
                checks += 1;
                worst = worst.max(err / cell);
                if err > cell {
                    failures += 1;
                }
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        failures == 0 && within_budget(elapsed, 10),
        format!(
            "{checks} grid comparisons, {failures} beyond one cell, worst {worst:.3} cells, {:.2}s",
            elapsed.as_secs_f64()
        ),
    )
}

fn criterion_2(log: &mut InvariantLog) -> Outcome {
    let p = StochasticProblem::quadratic(&[1.0], &[0.0], 0.0).unwrap();
    let mut opt = GalaSgd::new([1.0].into(), 0.1, 0.05, 1.0).unwrap();
    let mut s = RunStreams::new(0);
    let r0 = opt.step_with(&p, &mut s, Some(0.5)).unwrap();
    log.observe(Method::GalaSgd, Some(1.0), &r0);
    let x1 = opt.x()[0];
    let r1 = opt.step_with(&p, &mut s, Some(0.5)).unwrap();
    log.observe(Method::GalaSgd, Some(1.0), &r1);
    let x2 = opt.x()[0];
    let eta1 = 0.95 / 1.05;
    let checks = [
        (x1, 0.9),
        (r0.lipschitz.unwrap(), 1.0),
        (r0.eta_next, eta1),
        (x2, 0.9 - eta1 * 0.9),
    ];
    let worst = checks.iter().map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    outcome(
        worst <= 1e-9 && (x2 - 0.0857143).abs() < 5e-8 && (r0.eta_next - 0.9047619).abs() < 5e-8,
        format!("x1={x1} L0={} eta1={:.10} x2={x2:.10}, worst error {worst:.1e}", r0.lipschitz.unwrap(), r0.eta_next),
    )
}

fn criterion_3(log: &mut InvariantLog) -> Outcome {
    let p = StochasticProblem::quadratic(&[1.0], &[0.0], 0.0).unwrap();
    let mut h = HeuristicGala::new([1.0].into(), 0.1, 0.0).unwrap();
    let mut s = RunStreams::new(0);
    log.step(&mut h, None, &p, &mut s);
    let eta1 = log.step(&mut h, None, &p, &mut s).eta_played;

    let mut a = Adgd::new([1.0].into(), 0.1, 0.02).unwrap();
    let mut s = RunStreams::new(0);
    log.step(&mut a, None, &p, &mut s);
    let adgd_eta = log.step(&mut a, None, &p, &mut s).eta_played;
    let adgd_exact = 1.02f64.sqrt() * 0.1;

    let ok = (eta1 - 0.9).abs() <= 1e-12 && (adgd_eta - adgd_exact).abs() <= 1e-9 && (adgd_eta - 0.1009950).abs() < 5e-8;
    outcome(ok, format!("heuristic eta1={eta1:.15}, AdGD eta={adgd_eta:.10}"))
}

fn property_outcome(report: &PropertyReport, elapsed: Duration, limit_secs: u64) -> Outcome {
    outcome(
        report.passed() && within_budget(elapsed, limit_secs),
        format!(
            "{} trials, {} violations, {} skipped, worst margin {:.3e}, {:.2}s (limit {limit_secs}s)",
            report.trials,
            report.violations,
            report.skipped,
            report.worst_margin,
            elapsed.as_secs_f64()
        ),
    )
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let v = f();
    (v, start.elapsed())
}

fn criterion_4() -> Outcome {
    let (report, elapsed) = timed(|| sum_to_log_suite(0, 10_000).unwrap());
    property_outcome(&report, elapsed, 5)
}

fn criterion_5() -> Outcome {
    let (report, elapsed) = timed(|| normalized_align_suite(0, 100_000).unwrap());
    property_outcome(&report, elapsed, 5)
}

fn criterion_6() -> Outcome {
    let (report, elapsed) = timed(|| segment_unbiased_suite(0, 20, 100_000).unwrap());
    property_outcome(&report, elapsed, 30)
}

fn criterion_7(log: &mut InvariantLog) -> Outcome {
    let ((curve, steps), elapsed) = timed(|| gala_sgd_regret_curve(0).unwrap());
    for rec in &steps {
        log.observe(Method::GalaSgd, Some(1.0), rec);
    }
    let avg = curve.average();
    let ratio = avg[2] / avg[0];
    outcome(
        ratio < 0.2 && within_budget(elapsed, 60),
        format!(
            "Reg/T at T=1e2,1e3,1e4: {:.3e}, {:.3e}, {:.3e}; ratio {ratio:.4} (< 0.2), {:.2}s",
            avg[0],
            avg[1],
            avg[2],
            elapsed.as_secs_f64()
        ),
    )
}

fn criterion_8(log: &mut InvariantLog) -> Outcome {
    let start = Instant::now();
    let p = reference::nonconvex_sine().unwrap();
    let mut opt = NsgdGala::new(Vector::filled(p.dim(), 1.0), 0.1, 0.1, 1.0, 1e-8).unwrap();
    let cap = Some(opt.eta_max());
    let mut s = RunStreams::new(0);
    let mut norms = Vec::with_capacity(10_000);
    for _ in 0..10_000 {
        log.step(&mut opt, cap, &p, &mut s);
        norms.push(p.true_gradient(opt.x()).unwrap().norm());
    }
    // The method has no horizon parameter, so the first 10³ steps of this
    // run are exactly the T = 10³ run.
    let tail_mean = |t: usize| norms[t - t / 10..t].iter().sum::<f64>() / (t / 10) as f64;
    let (short, long) = (tail_mean(1_000), tail_mean(10_000));
    let elapsed = start.elapsed();
    outcome(
        long < 0.5 * short && within_budget(elapsed, 120),
        format!(
            "mean |grad F| over last 10%: T=1e3 {short:.4e}, T=1e4 {long:.4e}, ratio {:.3} (< 0.5), {:.2}s",
            long / short,
            elapsed.as_secs_f64()
        ),
    )
}

/// Mean final losses of the reference sweep (seeds 0, 1, 2), per eta0 in
/// `ROBUSTNESS_ETA0` order.
const GOLDEN_SGD: [f64; 7] = [3.178553e-2, 8.161485e-2, 2.108917e-1, 4.915171e-1, 6.637607e-1, 6.900794e-1, 6.931441e-1];
const GOLDEN_HEURISTIC: [f64; 7] = [3.646825e-2, 3.381067e-2, 3.385485e-2, 3.385368e-2, 3.385354e-2, 3.385352e-2, 3.385352e-2];
const GOLDEN_SGD_RATIO: f64 = 21.807;
const GOLDEN_HEURISTIC_RATIO: f64 = 1.079;

fn in_band(value: f64, golden: f64) -> bool {
    (value - golden).abs() <= 0.2 * golden.abs()
}

fn final_losses(res: &SweepResult, method: Method) -> Vec<f64> {
    reference::ROBUSTNESS_ETA0
        .iter()
        .map(|&eta| {
            res.summary_for(method, eta)
                .and_then(|s| s.final_loss_mean)
                .unwrap_or(f64::NAN)
        })
        .collect()
}

fn spread(v: &[f64]) -> f64 {
    let max = v.iter().copied().fold(f64::MIN, f64::max);
    let min = v.iter().copied().fold(f64::MAX, f64::min);
    max / min
}

fn criterion_9(log: &mut InvariantLog, out: &Path) -> Outcome {
    let cfg = reference::robustness_sweep();
    let (res, elapsed) = timed(|| run_sweep(&cfg, Some(out)).unwrap());
    for cell in &res.cells {
        log.steps += cell.outcome.rows.last().map_or(0, |r| r.step);
        log.violations.extend(cell.outcome.invariant_violations.iter().cloned());
    }
    let sgd = final_losses(&res, Method::Sgd);
    let heur = final_losses(&res, Method::GalaSgdHeuristic);
    let (r_sgd, r_heur) = (spread(&sgd), spread(&heur));
    let golden_ok = sgd.iter().zip(GOLDEN_SGD).all(|(&v, g)| in_band(v, g))
        && heur.iter().zip(GOLDEN_HEURISTIC).all(|(&v, g)| in_band(v, g))
        && in_band(r_sgd, GOLDEN_SGD_RATIO)
        && in_band(r_heur, GOLDEN_HEURISTIC_RATIO);
    let diverged: usize = res.summary.iter().map(|s| s.diverged).sum();
    outcome(
        r_heur <= 2.0 && r_sgd >= 10.0 && golden_ok && diverged == 0 && within_budget(elapsed, 300),
        format!(
            "max/min final loss: heuristic {r_heur:.3} (<= 2), sgd {r_sgd:.3} (>= 10); golden ±20% {}; {diverged} diverged; {:.2}s",
            if golden_ok { "ok" } else { "MISSED" },
            elapsed.as_secs_f64()
        ),
    )
}

/// Extra runs so every invariant-bearing variant is exercised on every
/// reference problem, including the logistic one.
fn criterion_10(log: &mut InvariantLog) -> Outcome {
    let logistic = reference::robustness_sweep().problem.build().unwrap();
    let problems = [
        StochasticProblem::quadratic(&[1.0], &[0.0], 0.1).unwrap(),
        reference::nonconvex_sine().unwrap(),
        logistic,
    ];
    for p in &problems {
        for &eta0 in &reference::ROBUSTNESS_ETA0 {
            let x0 = p.default_start();
            let mut s = RunStreams::new(0);
            let mut g = GalaSgd::new(x0.clone(), eta0, 1e-8, 1.0).unwrap();
            let mut n = NsgdGala::new(x0.clone(), eta0.min(0.1f64.sqrt()), 0.1, 1.0, 1e-8).unwrap();
            let cap = Some(n.eta_max());
            let mut a = Adgd::new(x0, eta0, 0.02).unwrap();
            for _ in 0..500 {
                log.step(&mut g, Some(1.0), p, &mut s);
                log.step(&mut n, cap, p, &mut s);
                log.step(&mut a, None, p, &mut s);
            }
        }
    }
    let first = log.violations.first().cloned().unwrap_or_default();
    outcome(
        log.violations.is_empty(),
        format!("{} steps checked, {} violations {first}", log.steps, log.violations.len()),
    )
}

/// Metrics CSVs under `root`, keyed by relative path, with the wall-clock
/// column removed.
fn csvs_without_wall_clock(root: &Path) -> Vec<(String, String)> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else if path.extension().is_some_and(|e| e == "csv") {
                let text = fs::read_to_string(&path).unwrap();
                let header: Vec<&str> = text.lines().next().unwrap().split(',').collect();
                let wall = header.iter().position(|h| *h == "wall_nanos").unwrap();
                let stripped: Vec<String> = text
                    .lines()
                    .map(|l| {
                        l.split(',')
                            .enumerate()
                            .filter(|(i, _)| *i != wall)
                            .map(|(_, f)| f)
                            .collect::<Vec<_>>()
                            .join(",")
                    })
                    .collect();
                let rel = path.strip_prefix(root).unwrap().to_string_lossy().into_owned();
                out.push((rel, stripped.join("\n")));
            }
        }
    }
    out.sort();
    out
}

fn criterion_11(first: &Path, second: &Path) -> Outcome {
    run_sweep(&reference::robustness_sweep(), Some(second)).unwrap();
    let a = csvs_without_wall_clock(first);
    let b = csvs_without_wall_clock(second);
    let identical = a.len() == 42 && a == b;
    outcome(identical, format!("{} vs {} metrics CSVs, identical: {identical}", a.len(), b.len()))
}

fn main() {
    let dir = tempfile::tempdir().expect("temp dir");
    let first = dir.path().join("first");
    let second = dir.path().join("second");
    let mut log = InvariantLog::default();

    let results = [
        ("1 FTRL/OFTRL closed form vs dense grid", criterion_1()),
        ("2 SGD-GALA hand trace", criterion_2(&mut log)),
        ("3 heuristic and AdGD hand traces", criterion_3(&mut log)),
        ("4 sum-to-log suite", criterion_4()),
        ("5 normalized alignment suite", criterion_5()),
        ("6 segment-gradient unbiasedness", criterion_6()),
        ("7 regret sublinearity", criterion_7(&mut log)),
        ("8 gradient-norm decay", criterion_8(&mut log)),
        ("9 learning-rate robustness", criterion_9(&mut log, &first)),
        ("10 per-step invariants", criterion_10(&mut log)),
        ("11 sweep determinism", criterion_11(&first, &second)),
    ];
    let mut failed = 0;
    for (name, o) in &results {
        let status = if o.passed { "PASS" } else { "FAIL" };
        failed += usize::from(!o.passed);
        println!("{status} criterion {name}: {}", o.detail);
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
