//! AdaGrad-norm dual averaging on raw gradients, with a uniform average.

use normgrad::learners::LearnerConfig;
use normgrad::problems::Problem;
use normgrad::reduction::{bound_report, run_adagrad_warmup};
use normgrad::vector::Vector;

fn main() -> normgrad::Result<()> {
    let xstar = Vector::zeros(3);
    let problems = [
        Problem::quadratic(xstar.clone()),
        Problem::power_norm(0.5, xstar.clone())?,
        Problem::huber(0.5, xstar.clone())?,
    ];
    let start = Vector::new(vec![0.6, -0.3, 0.5])?;
    for p in &problems {
        // G must dominate every gradient norm seen along the run
        let cfg = LearnerConfig::adagrad_da(1.0, 2.0, start.clone());
        for horizon in [64, 512, 4096] {
            let run = run_adagrad_warmup(&cfg, p, horizon)?;
            let report = bound_report(&run, p, &cfg)?;
            println!(
                "{:<18} T={horizon:<5} gap {:>10.3e}  closed form {:>10.3e}  G exceeded {}",
                p.family().to_string(),
                report.measured,
                report.closed_form_bound,
                run.grad_bound_exceeded
            );
        }
    }
    Ok(())
}
