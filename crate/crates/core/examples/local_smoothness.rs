//! On a Huber loss started far out in its linear region, most iterates see a
//! small local constant, so the geometric-mean bound beats the arithmetic one.

use normgrad::learners::LearnerConfig;
use normgrad::problems::Problem;
use normgrad::reduction::{bound_report, hm_gm_am, run_normalized, DEFAULT_EPS_ZERO};
use normgrad::vector::Vector;

fn main() -> normgrad::Result<()> {
    let p = Problem::huber(0.1, Vector::zeros(2))?;
    let cfg = LearnerConfig::da_sqrt(2.0, Vector::new(vec![30.0, -40.0])?);
    let run = run_normalized(&cfg, &p, 2048, DEFAULT_EPS_ZERO)?;
    let report = bound_report(&run, &p, &cfg)?;
    let means = hm_gm_am(&report.local_constants)?;
    println!("declared L_nu     {:.4}", p.spec().l_nu);
    println!("local constants   hm {:.4}  gm {:.4}  am {:.4}", means.harmonic, means.geometric, means.arithmetic);
    println!("measured gap      {:.4e}", report.measured);
    println!("bound (gm)        {:.4e}", report.bound_gm.unwrap_or(f64::NAN));
    println!("bound (am)        {:.4e}", report.bound_am.unwrap_or(f64::NAN));
    println!("closed form       {:.4e}", report.closed_form_bound);
    Ok(())
}
