//! Normalized SGD with momentum and an optimistic-FTRL learning rate on a
//! noisy nonconvex problem (`Σ λᵢxᵢ²/2 + a·sin(ωxᵢ)`, dim 10, σ = 0.1).
//! Prints the gradient norm averaged over windows of the trajectory
//! (`cargo run --example nsgd_gala -- <seed> <window>`), the
//! learning rate, and the two local Lipschitz estimates.

use gala::harness::reference;
use gala::optimizers::{NsgdGala, Optimizer};
use gala::rng::RunStreams;
use gala::Vector;

fn main() -> gala::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    let window = std::env::args().nth(2).and_then(|s| s.parse().ok()).unwrap_or(1000);
    let problem = reference::nonconvex_sine()?;
    let mut opt = NsgdGala::new(Vector::filled(problem.dim(), 1.0), 0.1, 0.1, 1.0, 1e-8)?;
    let mut streams = RunStreams::new(seed);

    let mut sum = 0.0;
    println!("{:>7} {:>14} {:>10} {:>10} {:>10}", "steps", "mean |grad F|", "eta", "L", "L~");
    for t in 1..=10_000 {
        let rec = opt.step(&problem, &mut streams)?;
        sum += problem.true_gradient(opt.x())?.norm();
        if t % window == 0 {
            println!(
                "{t:>7} {:>14.6e} {:>10.6} {:>10.4} {:>10.4}",
                sum / window as f64,
                rec.eta_next,
                rec.lipschitz.unwrap_or(f64::NAN),
                rec.lipschitz_tilde.unwrap_or(f64::NAN)
            );
            sum = 0.0;
        }
    }
    Ok(())
}
