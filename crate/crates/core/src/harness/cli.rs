//! Command-line front end.
//!
//! Exit codes: 0 on success; 1 for usage and validation errors (bad flags,
//! malformed config, unknown property); 2 for runtime failures: I/O errors,
//! a diverged `run`, a `sweep` in which every cell diverged, or a `verify`
//! that found violations.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::error::{GalaError, Result};
use crate::verification::{run_property, PropertyReport, PROPERTY_NAMES};

use super::config::{RunConfig, SweepConfig};
use super::io::emit_summary;
use super::run::run_experiment;
use super::sweep::{metrics_path, run_sweep, summarize_dir, summarize_runs, SUMMARY_FILE};
use super::io::emit_csv;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "gala", version, about = "Gradient-alignment learning-rate experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Execute one configured run and write its metrics CSV and summary.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Execute an optimizer × eta0 × seed sweep.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the property checks and write one JSON report per line.
    Verify {
        /// A single property; all of them when omitted.
        #[arg(long)]
        property: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Recompute a summary from the per-run CSVs under a directory.
    Summarize {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn exit_code_for(e: &GalaError) -> i32 {
    match e {
        GalaError::Config { .. } | GalaError::InvalidArgument { .. } => EXIT_INVALID,
        _ => EXIT_RUNTIME,
    }
}

/// Parses `args` (including the program name) and executes the command.
pub fn cli_main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

fn execute(command: Command) -> Result<i32> {
    match command {
        Command::Run { config, out } => cmd_run(&config, &out),
        Command::Sweep { config, out } => cmd_sweep(&config, &out),
        Command::Verify { property, seed, out } => cmd_verify(property.as_deref(), seed, &out),
        Command::Summarize { input, out } => {
            let summary = summarize_dir(&input)?;
            emit_summary(&summary, &out)?;
            println!("summarized {} group(s) into {}", summary.len(), out.display());
            Ok(EXIT_OK)
        }
    }
}

fn cmd_run(config: &Path, out: &Path) -> Result<i32> {
    let cfg = RunConfig::from_file(config)?;
    let outcome = run_experiment(&cfg)?;
    let method = cfg.optimizer.method();
    let csv = metrics_path(out, method, cfg.eta0, cfg.seed);
    emit_csv(&outcome.rows, &csv)?;
    let summary = summarize_runs(method, cfg.eta0, [outcome.rows.as_slice()]);
    emit_summary(std::slice::from_ref(&summary), &out.join(SUMMARY_FILE))?;
    for v in &outcome.invariant_violations {
        eprintln!("invariant violated: {v}");
    }
    match (&outcome.divergence_reason, outcome.final_row()) {
        (Some(reason), _) => {
            eprintln!("run diverged: {reason}");
            Ok(EXIT_RUNTIME)
        }
        (None, Some(last)) => {
            println!(
                "{method} eta0={:e} seed={}: step {} loss {:e} grad_norm {:e} -> {}",
                cfg.eta0,
                cfg.seed,
                last.step,
                last.loss,
                last.grad_norm,
                csv.display()
            );
            Ok(EXIT_OK)
        }
        (None, None) => Err(GalaError::Inconsistent("run produced no rows".into())),
    }
}

fn cmd_sweep(config: &Path, out: &Path) -> Result<i32> {
    let cfg = SweepConfig::from_file(config)?;
    let result = run_sweep(&cfg, Some(out))?;
    for s in &result.summary {
        println!(
            "{:<20} eta0={:<8e} loss={} diverged={}/{}",
            s.optimizer,
            s.eta0,
            s.final_loss_mean.map_or("-".to_string(), |v| format!("{v:.6e}")),
            s.diverged,
            s.runs
        );
    }
    if result.all_diverged() {
        eprintln!("every sweep cell diverged");
        return Ok(EXIT_RUNTIME);
    }
    Ok(EXIT_OK)
}

fn cmd_verify(property: Option<&str>, seed: u64, out: &Path) -> Result<i32> {
    let names: Vec<&str> = match property {
        Some(p) => vec![p],
        None => PROPERTY_NAMES.to_vec(),
    };
    let reports = names
        .iter()
        .map(|name| run_property(name, seed))
        .collect::<Result<Vec<PropertyReport>>>()?;
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| GalaError::io(dir, e))?;
    }
    let lines: Vec<String> = reports
        .iter()
        .map(|r| serde_json::to_string(r).map_err(|e| GalaError::Inconsistent(e.to_string())))
        .collect::<Result<_>>()?;
    std::fs::write(out, lines.join("\n") + "\n").map_err(|e| GalaError::io(out, e))?;
    let mut failed = false;
    for r in &reports {
        let status = if r.passed() { "PASS" } else { "FAIL" };
        failed |= !r.passed();
        println!(
            "{status} {}: {} trials, {} violations, {} skipped, worst margin {:e}",
            r.property_name, r.trials, r.violations, r.skipped, r.worst_margin
        );
    }
    Ok(if failed { EXIT_RUNTIME } else { EXIT_OK })
}
