//! Sweeps PowerNorm problems over smoothness exponents and fits the
//! empirical log-log rate of each series.

use normgrad::bench::{fit_sweep_rates, run_sweep, SweepGrid};
use normgrad::learners::LearnerKind;

fn main() -> normgrad::Result<()> {
    let grid = SweepGrid {
        learners: vec![LearnerKind::OgdConst, LearnerKind::DaSqrt],
        seeds: vec![0],
        distance: 3.7,
        ..SweepGrid::default()
    };
    let rows = run_sweep(&grid)?;
    let violations = rows.iter().filter(|r| !r.bounds_hold).count();
    println!("{} cells, {} bound violations", rows.len(), violations);
    for f in fit_sweep_rates(&rows) {
        match f.fit {
            Ok(fit) => println!(
                "nu={:<4} {:<9} slope {:>7.3} (worst case {:>6.3})  r2 {:.3}",
                f.nu, f.learner, fit.slope, fit.predicted_slope, fit.r_squared
            ),
            Err(e) => println!("nu={:<4} {:<9} {e}", f.nu, f.learner),
        }
    }
    Ok(())
}
