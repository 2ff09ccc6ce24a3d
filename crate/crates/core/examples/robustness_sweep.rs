//! Learning-rate robustness on synthetic logistic regression: plain SGD
//! against the practical SGD-GALA variant across initial learning rates
//! spanning eight orders of magnitude, three seeds each. Writes every run's
//! metrics CSV and the summary under the directory given as the first
//! argument (default `target/robustness_sweep`).

use std::path::PathBuf;

use gala::harness::{reference, run_sweep, SweepConfig};

fn main() -> gala::Result<()> {
    let out: PathBuf = std::env::args()
        .nth(1)
        .map_or_else(|| PathBuf::from("target/robustness_sweep"), PathBuf::from);
    // An optional second argument replaces the built-in sweep config.
    let cfg = match std::env::args().nth(2) {
        Some(path) => SweepConfig::from_file(path.as_ref())?,
        None => reference::robustness_sweep(),
    };
    let result = run_sweep(&cfg, Some(&out))?;
    println!("{:<20} {:>8} {:>14} {:>12} {:>14}", "optimizer", "eta0", "final loss", "std", "final eta");
    for s in &result.summary {
        println!(
            "{:<20} {:>8e} {:>14.6e} {:>12.3e} {:>14.6e}",
            s.optimizer,
            s.eta0,
            s.final_loss_mean.unwrap_or(f64::NAN),
            s.final_loss_std.unwrap_or(f64::NAN),
            s.final_eta_mean.unwrap_or(f64::NAN)
        );
    }
    for name in ["sgd", "gala_sgd_heuristic"] {
        let losses: Vec<f64> = result
            .summary
            .iter()
            .filter(|s| s.optimizer == name)
            .filter_map(|s| s.final_loss_mean)
            .collect();
        let max = losses.iter().copied().fold(f64::MIN, f64::max);
        let min = losses.iter().copied().fold(f64::MAX, f64::min);
        println!("{name}: max/min final loss across eta0 = {:.3}", max / min);
    }
    println!("outputs under {}", out.display());
    Ok(())
}
