//! Drives each unit-loss learner with a seeded stream of random unit vectors
//! and compares its worst realized regret over a ring of comparators against
//! the closed-form bound.

use normgrad::learners::{Learner, LearnerConfig};
use normgrad::vector::{dot, l2_norm, Vector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> normgrad::Result<()> {
    let horizon = 1000;
    let start = Vector::zeros(2);
        let configs = [
        LearnerConfig::ogd_const(1.0, horizon, start.clone()),
        LearnerConfig::da_sqrt(1.0, start.clone()),
        LearnerConfig::kt(1.0, start.clone()),
    ];
    for cfg in configs {
        let mut learner = Learner::new(cfg.clone())?;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut points = Vec::with_capacity(horizon);
        let mut losses = Vec::with_capacity(horizon);
        for _ in 0..horizon {
            points.push(learner.next_point());
            let raw = Vector::new(vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)])?;
            let q = raw.scale(1.0 / l2_norm(&raw));
            learner.observe(&q)?;
            losses.push(q);
        }
        let mut regret = f64::NEG_INFINITY;
        for k in 0..64 {
            let angle = k as f64 * std::f64::consts::TAU / 64.0;
            let u = Vector::new(vec![5.0 * angle.cos(), 5.0 * angle.sin()])?;
            let mut r = 0.0;
            for (x, q) in points.iter().zip(&losses) {
                r += dot(q, &x.sub(&u)?)?;
            }
            regret = regret.max(r);
        }
        let dist = 5.0;
        let bound = cfg.regret_bound(dist, horizon, None)?;
        println!("{:<10} worst regret at distance 5 {:>9.3}  bound {:>9.3}", cfg.kind, regret, bound);
    }
    Ok(())
}
