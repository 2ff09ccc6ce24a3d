//! Experiment harness: TOML configs, single runs, parallel sweeps, CSV and
//! summary persistence, and the `gala` command line.
//!
//! Output layout, shared by `run` and `sweep`:
//!
//! ```text
//! <out>/<optimizer>/<eta0>/<seed>/metrics.csv
//! <out>/summary.jsonl
//! ```
//!
//! where `<eta0>` is written in Rust's `{:e}` form (`1e-3`).

pub mod cli;
pub mod config;
pub mod io;
pub mod reference;
pub mod run;
pub mod sweep;

pub use cli::cli_main;
pub use config::{CurvatureNormConfig, OptimizerConfig, ProblemConfig, RunConfig, SweepConfig, WORKERS_ENV};
pub use io::{emit_csv, emit_summary, read_csv, read_summary, CSV_HEADER};
pub use run::{check_step_invariants, run_experiment, MetricsRow, RunOutcome};
pub use sweep::{
    final_stats, metrics_path, run_sweep, summarize_dir, summarize_runs, FinalStats, SummaryRecord, SweepCell,
    SweepResult,
};
