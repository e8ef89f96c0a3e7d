//! The KT coin-betting learner needs no step size: the same configuration
//! works whether the start is 1 or 100 units away from the minimizer.

use normgrad::learners::LearnerConfig;
use normgrad::problems::Problem;
use normgrad::reduction::{bound_report, run_normalized, DEFAULT_EPS_ZERO};
use normgrad::vector::Vector;

fn main() -> normgrad::Result<()> {
    let p = Problem::quadratic(Vector::zeros(2));
    for distance in [1.0, 10.0, 100.0] {
        let start = Vector::new(vec![distance * 0.6, distance * 0.8])?;
        let cfg = LearnerConfig::kt(1.0, start);
        for horizon in [256, 4096, 16384] {
            let run = run_normalized(&cfg, &p, horizon, DEFAULT_EPS_ZERO)?;
            let report = bound_report(&run, &p, &cfg)?;
            println!(
                "D={distance:<5} T={horizon:<6} gap {:>10.3e}  closed form {:>10.3e}",
                report.measured, report.closed_form_bound
            );
        }
    }
    Ok(())
}
