//! Runs every built-in property check and prints one line per property.
//! (`cargo run --example verify_properties -- <seed>`)

use gala::verification::{run_property, PROPERTY_NAMES};

fn main() -> gala::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    let mut failed = 0;
    for name in PROPERTY_NAMES {
        let report = run_property(name, seed)?;
        println!(
            "{:<4} {name:<22} trials {:>6} violations {:>3} skipped {:>4} worst margin {:+.3e}",
            if report.passed() { "ok" } else { "FAIL" },
            report.trials,
            report.violations,
            report.skipped,
            report.worst_margin
        );
        failed += usize::from(!report.passed());
    }
    if failed > 0 {
        std::process::exit(1);
    }
    Ok(())
}
