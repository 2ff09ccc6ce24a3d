//! Loads a run configuration from TOML, executes it and writes the metrics
//! CSV. (`cargo run --example run_from_config -- configs/run_quadratic.toml out.csv`)

use std::path::PathBuf;

use gala::harness::{emit_csv, run_experiment, RunConfig};

fn main() -> gala::Result<()> {
    let mut args = std::env::args().skip(1);
    let config = args.next().map(PathBuf::from).unwrap_or_else(|| "configs/run_quadratic.toml".into());
    let out = args.next().map(PathBuf::from).unwrap_or_else(|| "metrics.csv".into());
    let cfg = RunConfig::from_file(&config)?;
    let outcome = run_experiment(&cfg)?;
    emit_csv(&outcome.rows, &out)?;
    let last = outcome.final_row().expect("step 0 is always logged");
    println!(
        "{} rows -> {}; final step {} loss {:.6e} eta {:.4e}{}",
        outcome.rows.len(),
        out.display(),
        last.step,
        last.loss,
        last.eta,
        outcome.divergence_reason.as_ref().map(|r| format!(" (diverged: {r})")).unwrap_or_default()
    );
    Ok(())
}
