//! Normalized gradient descent on problems of every smoothness level, using
//! the same step scale for all of them.

use normgrad::learners::LearnerConfig;
use normgrad::problems::Problem;
use normgrad::reduction::{bound_report, run_normalized, DEFAULT_EPS_ZERO};
use normgrad::vector::{axpy, Vector};

fn main() -> normgrad::Result<()> {
    let horizon = 4096;
    for p in Problem::suite(6, 1) {
        let start = axpy(1.0, &Vector::new(vec![1.5; 6])?, p.minimizer())?;
        let cfg = LearnerConfig::ogd_const(1.0, horizon, start);
        let run = run_normalized(&cfg, &p, horizon, DEFAULT_EPS_ZERO)?;
        let report = bound_report(&run, &p, &cfg)?;
        println!(
            "{:<22} gap {:>10.3e}  closed form {:>10.3e}  steps {:>5}  holds {}",
            p.family().to_string(),
            report.measured,
            report.closed_form_bound,
            run.steps_taken(),
            report.holds()
        );
    }
    Ok(())
}
