//! Checks the Hölder descent inequality and gradient bound on every shipped
//! family, then estimates each declared constant from random pairs.

use normgrad::problems::{
    check_descent_inequality, sample_holder_constant, sample_point, Problem, DEFAULT_SAMPLE_RADIUS,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> normgrad::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    println!("{:<22} {:>5} {:>10} {:>10} {:>10}", "family", "nu", "L_nu", "sampled", "min slack");
    for p in Problem::suite(5, 7) {
        let mut worst = f64::INFINITY;
        for _ in 0..2000 {
            let x = sample_point(&p, &mut rng, DEFAULT_SAMPLE_RADIUS);
            let y = sample_point(&p, &mut rng, DEFAULT_SAMPLE_RADIUS);
            worst = worst.min(check_descent_inequality(&p, &x, &y)?.residual);
        }
        let sampled = sample_holder_constant(&p, 2000, 7)?;
        println!(
            "{:<22} {:>5} {:>10.4} {:>10.4} {:>10.3e}",
            p.family().to_string(),
            p.spec().nu,
            p.spec().l_nu,
            sampled,
            worst
        );
    }
    Ok(())
}
