//! Adam versus Adam-GALA across initial learning rates on synthetic logistic
//! regression (dim 20, 1000 samples, batch 32). Adam's result depends on
//! `eta0`; Adam-GALA replaces it after the first step.
//! (`cargo run --example adam_gala -- <steps>`)

use gala::harness::{run_experiment, OptimizerConfig, ProblemConfig, RunConfig};
use gala::optimizers::Method;

fn main() -> gala::Result<()> {
    let steps = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2000);
    let problem = ProblemConfig::Logistic {
        dim: 20,
        n_samples: 1000,
        batch_size: 32,
        label_noise: 0.0,
        noise_level: 0.0,
        data_seed: 0,
    };
    println!("{:>10} {:>14} {:>14} {:>12}", "eta0", "Adam loss", "Adam-GALA loss", "GALA eta");
    for eta0 in [1e1, 1.0, 1e-1, 1e-2, 1e-3, 1e-4] {
        let mut finals = Vec::new();
        for method in [Method::Adam, Method::AdamGala] {
            let cfg = RunConfig {
                problem: problem.clone(),
                optimizer: OptimizerConfig::default_for(method),
                eta0,
                steps,
                seed: 0,
                log_every: steps.max(1),
                x0: None,
                held_out: false,
            };
            let out = run_experiment(&cfg)?;
            finals.push(out.final_row().expect("step 0 is always logged").clone());
        }
        println!(
            "{eta0:>10.0e} {:>14.6e} {:>14.6e} {:>12.4e}",
            finals[0].loss, finals[1].loss, finals[1].eta
        );
    }
    Ok(())
}
