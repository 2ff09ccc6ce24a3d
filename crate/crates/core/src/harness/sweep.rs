//! Learning-rate robustness sweeps and their summaries.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{GalaError, Result};
use crate::optimizers::Method;

use super::config::{OptimizerConfig, RunConfig, SweepConfig};
use super::io::{emit_csv, emit_summary, read_csv};
use super::run::{run_experiment, MetricsRow, RunOutcome};

pub const METRICS_FILE: &str = "metrics.csv";
pub const SUMMARY_FILE: &str = "summary.jsonl";

/// Fraction of logged rows averaged into a run's "final" statistics.
pub const FINAL_FRACTION: f64 = 0.05;

/// Directory name for an initial learning rate, e.g. `1e-3`.
pub fn eta0_dir_name(eta0: f64) -> String {
    format!("{eta0:e}")
}

/// `<root>/<optimizer>/<eta0>/<seed>/metrics.csv`.
pub fn metrics_path(root: &Path, method: Method, eta0: f64, seed: u64) -> PathBuf {
    root.join(method.as_str())
        .join(eta0_dir_name(eta0))
        .join(seed.to_string())
        .join(METRICS_FILE)
}

/// Final-state statistics of one run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FinalStats {
    pub loss: f64,
    pub grad_norm: f64,
    pub eta: f64,
}

/// Means over the last 5% (at least one) of the logged rows; `None` for a
/// diverged or empty run.
pub fn final_stats(rows: &[MetricsRow]) -> Option<FinalStats> {
    if rows.is_empty() || rows.iter().any(|r| r.diverged) {
        return None;
    }
    let k = ((rows.len() as f64 * FINAL_FRACTION).ceil() as usize).max(1);
    let tail = &rows[rows.len() - k..];
    let mean = |f: fn(&MetricsRow) -> f64| tail.iter().map(f).sum::<f64>() / k as f64;
    Some(FinalStats {
        loss: mean(|r| r.loss),
        grad_norm: mean(|r| r.grad_norm),
        eta: mean(|r| r.eta),
    })
}

/// Aggregate over seeds for one `(optimizer, eta0)` pair. Statistics cover
/// the non-diverged runs; standard deviations are population (a single run
/// gives 0). `None` means no run contributed a finite value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRecord {
    pub optimizer: String,
    pub eta0: f64,
    pub runs: usize,
    pub diverged: usize,
    pub final_loss_mean: Option<f64>,
    pub final_loss_std: Option<f64>,
    pub final_grad_norm_mean: Option<f64>,
    pub final_grad_norm_std: Option<f64>,
    pub final_eta_mean: Option<f64>,
    pub final_eta_std: Option<f64>,
}

fn mean_std(values: &[f64]) -> (Option<f64>, Option<f64>) {
    if values.is_empty() {
        return (None, None);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let finite = |v: f64| v.is_finite().then_some(v);
    (finite(mean), finite(var.sqrt()))
}

/// Builds a summary record from the rows of every seed of one cell group.
pub fn summarize_runs<'a>(optimizer: Method, eta0: f64, runs: impl IntoIterator<Item = &'a [MetricsRow]>) -> SummaryRecord {
    let mut total = 0;
    let mut stats = Vec::new();
    for rows in runs {
        total += 1;
        if let Some(s) = final_stats(rows) {
            stats.push(s);
        }
    }
    let (loss_m, loss_s) = mean_std(&stats.iter().map(|s| s.loss).collect::<Vec<_>>());
    let (gn_m, gn_s) = mean_std(&stats.iter().map(|s| s.grad_norm).collect::<Vec<_>>());
    let (eta_m, eta_s) = mean_std(&stats.iter().map(|s| s.eta).collect::<Vec<_>>());
    SummaryRecord {
        optimizer: optimizer.as_str().to_string(),
        eta0,
        runs: total,
        diverged: total - stats.len(),
        final_loss_mean: loss_m,
        final_loss_std: loss_s,
        final_grad_norm_mean: gn_m,
        final_grad_norm_std: gn_s,
        final_eta_mean: eta_m,
        final_eta_std: eta_s,
    }
}

/// Summary rows are ordered by optimizer, then by decreasing `eta0`.
fn sort_summary(records: &mut [SummaryRecord]) {
    records.sort_by(|a, b| a.optimizer.cmp(&b.optimizer).then(b.eta0.total_cmp(&a.eta0)));
}

/// One `(optimizer, eta0, seed)` run of a sweep.
#[derive(Debug, Clone)]
pub struct SweepCell {
    pub optimizer: Method,
    pub eta0: f64,
    pub seed: u64,
    pub outcome: RunOutcome,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub cells: Vec<SweepCell>,
    pub summary: Vec<SummaryRecord>,
}

impl SweepResult {
    pub fn all_diverged(&self) -> bool {
        self.cells.iter().all(|c| c.outcome.diverged)
    }

    pub fn summary_for(&self, method: Method, eta0: f64) -> Option<&SummaryRecord> {
        self.summary
            .iter()
            .find(|s| s.optimizer == method.as_str() && s.eta0 == eta0)
    }
}

fn run_cell(cfg: &RunConfig) -> RunOutcome {
    // A failing cell becomes a diverged record instead of aborting the sweep.
    run_experiment(cfg).unwrap_or_else(|e| RunOutcome {
        rows: Vec::new(),
        diverged: true,
        divergence_reason: Some(e.to_string()),
        invariant_violations: Vec::new(),
    })
}

/// Runs the Cartesian product of optimizers × eta0 × seeds in parallel and
/// aggregates. With `out`, every run's CSV and the summary are written
/// there by the calling thread once all cells finish.
pub fn run_sweep(cfg: &SweepConfig, out: Option<&Path>) -> Result<SweepResult> {
    cfg.validate()?;
    let jobs: Vec<(OptimizerConfig, f64, u64)> = cfg
        .optimizers
        .iter()
        .flat_map(|o| {
            cfg.eta0
                .iter()
                .flat_map(move |&eta0| cfg.seeds.iter().map(move |&seed| (o.clone(), eta0, seed)))
        })
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.resolved_workers()?)
        .build()
        .map_err(|e| GalaError::Inconsistent(format!("worker pool: {e}")))?;
    let cells: Vec<SweepCell> = pool.install(|| {
        jobs.par_iter()
            .map(|(opt, eta0, seed)| SweepCell {
                optimizer: opt.method(),
                eta0: *eta0,
                seed: *seed,
                outcome: run_cell(&cfg.cell(opt.clone(), *eta0, *seed)),
            })
            .collect()
    });

    let mut groups: BTreeMap<(Method, u64), Vec<&[MetricsRow]>> = BTreeMap::new();
    for c in &cells {
        groups
            .entry((c.optimizer, c.eta0.to_bits()))
            .or_default()
            .push(&c.outcome.rows);
    }
    let mut summary: Vec<SummaryRecord> = groups
        .into_iter()
        .map(|((m, eta_bits), runs)| summarize_runs(m, f64::from_bits(eta_bits), runs))
        .collect();
    sort_summary(&mut summary);

    if let Some(root) = out {
        for c in &cells {
            emit_csv(&c.outcome.rows, &metrics_path(root, c.optimizer, c.eta0, c.seed))?;
        }
        emit_summary(&summary, &root.join(SUMMARY_FILE))?;
    }
    Ok(SweepResult { cells, summary })
}

fn sorted_subdirs(dir: &Path) -> Result<Vec<(String, PathBuf)>> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| GalaError::io(dir, e))? {
        let entry = entry.map_err(|e| GalaError::io(dir, e))?;
        let path = entry.path();
        if path.is_dir() {
            out.push((entry.file_name().to_string_lossy().into_owned(), path));
        }
    }
    out.sort();
    Ok(out)
}

/// Recomputes the summary from the per-run CSVs under a run or sweep
/// output directory. Directories that do not follow the
/// `<optimizer>/<eta0>/<seed>/metrics.csv` layout are ignored.
pub fn summarize_dir(root: &Path) -> Result<Vec<SummaryRecord>> {
    let mut summary = Vec::new();
    for (opt_name, opt_dir) in sorted_subdirs(root)? {
        let Ok(method) = opt_name.parse::<Method>() else {
            continue;
        };
        for (eta_name, eta_dir) in sorted_subdirs(&opt_dir)? {
            let Ok(eta0) = eta_name.parse::<f64>() else {
                continue;
            };
            let mut runs = Vec::new();
            for (seed_name, seed_dir) in sorted_subdirs(&eta_dir)? {
                let csv = seed_dir.join(METRICS_FILE);
                if seed_name.parse::<u64>().is_ok() && csv.is_file() {
                    runs.push(read_csv(&csv)?);
                }
            }
            if !runs.is_empty() {
                summary.push(summarize_runs(method, eta0, runs.iter().map(Vec::as_slice)));
            }
        }
    }
    if summary.is_empty() {
        return Err(GalaError::Parse {
            path: root.to_path_buf(),
            reason: format!("no <optimizer>/<eta0>/<seed>/{METRICS_FILE} files found"),
        });
    }
    sort_summary(&mut summary);
    Ok(summary)
}
