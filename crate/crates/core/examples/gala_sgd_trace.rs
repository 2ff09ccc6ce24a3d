//! A step-by-step trace of SGD-GALA on the noiseless 1-D quadratic
//! `f(x) = x²/2` from `x₀ = 1`, `η₀ = 0.5`, with the segment point pinned to
//! the midpoint (λ = ½). Every quantity can be checked by hand: the gradient
//! is `x`, the local Lipschitz estimate is exactly 1, and the learning rate
//! is the FTRL minimiser `clip(Σ⟨g'(w), g⟩ / (δ + Σ L‖g‖²))`.

use gala::optimizers::{GalaSgd, Optimizer};
use gala::problems::StochasticProblem;
use gala::rng::RunStreams;
use gala::Vector;

fn main() -> gala::Result<()> {
    let problem = StochasticProblem::quadratic(&[1.0], &[0.0], 0.0)?;
    let mut opt = GalaSgd::new(Vector::from(vec![1.0]), 0.5, 1e-8, 1.0)?;
    let mut streams = RunStreams::new(0);

    println!("{:>2} {:>12} {:>10} {:>12} {:>12} {:>8} {:>10}", "t", "x_t", "eta_t", "<g'(w),g>", "L|g|^2", "L_t", "eta_t+1");
    for t in 0..8 {
        let x = opt.x()[0];
        let rec = opt.step_with(&problem, &mut streams, Some(0.5))?;
        let (coeffs, _) = rec.surrogate.expect("GALA reveals a surrogate every step");
        println!(
            "{t:>2} {x:>12.6e} {:>10.6} {:>12.6e} {:>12.6e} {:>8.4} {:>10.6}",
            rec.eta_played,
            coeffs.linear,
            coeffs.curvature_increment(),
            rec.lipschitz.unwrap_or(f64::NAN),
            rec.eta_next
        );
    }
    println!("final x = {:.6e}", opt.x()[0]);
    Ok(())
}
