//! Adaptive gradient descent on an ill-conditioned noisy quadratic
//! (eigenvalues 1..100, σ = 0.01). Each step is bounded by both the growth
//! candidate and the local-curvature candidate; the trace shows which one
//! was active.

use gala::optimizers::{Adgd, Optimizer};
use gala::problems::StochasticProblem;
use gala::rng::RunStreams;
use gala::Vector;

fn main() -> gala::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    let eigenvalues: Vec<f64> = (0..10).map(|i| 10f64.powf(2.0 * i as f64 / 9.0)).collect();
    let problem = StochasticProblem::quadratic(&eigenvalues, &[0.0; 10], 0.01)?;
    let mut opt = Adgd::new(Vector::filled(10, 1.0), 1e-6, 1.0)?;
    let mut streams = RunStreams::new(seed);

    println!("{:>6} {:>14} {:>12} {:>10}", "step", "F(x)", "eta", "active");
    for t in 1..=2000 {
        let rec = opt.step(&problem, &mut streams)?;
        if t % 200 == 0 || t <= 5 {
            let active = match rec.adgd_bounds {
                Some((growth, curvature)) if growth <= curvature => "growth",
                Some(_) => "curvature",
                None => "initial",
            };
            println!("{t:>6} {:>14.6e} {:>12.4e} {active:>10}", problem.value(opt.x())?, rec.eta_played);
        }
    }
    println!("1/L = {:.4e}", 1.0 / problem.lipschitz_constant().unwrap_or(f64::NAN));
    Ok(())
}
