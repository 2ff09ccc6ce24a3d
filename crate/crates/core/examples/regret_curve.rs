//! SGD-GALA on the 1-D noisy quadratic `x²/2` (σ = 0.1): the regret of the
//! played learning rates against the best fixed rate in hindsight, at
//! growing horizons. Average regret `Reg(T)/T` should shrink roughly like
//! `log T / T`.

use gala::verification::{gala_sgd_regret_curve, lipschitz_stats};

fn main() -> gala::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    let (curve, steps) = gala_sgd_regret_curve(seed)?;
    println!("{:>8} {:>14} {:>14} {:>12}", "T", "Reg(T)", "Reg(T)/T", "best eta");
    for ((t, r), (avg, eta)) in curve
        .horizons
        .iter()
        .zip(&curve.regret_at_t)
        .zip(curve.average().iter().zip(&curve.best_eta_at_t))
    {
        println!("{t:>8} {r:>14.6e} {avg:>14.6e} {eta:>12.6}");
    }
    if let Some(l) = lipschitz_stats(&steps) {
        println!("local Lipschitz estimates: max {:.4}, mean {:.4}", l.max, l.mean);
    }
    let last = steps.last().expect("non-empty run");
    println!("final learning rate {:.6}", last.eta_next);
    Ok(())
}
