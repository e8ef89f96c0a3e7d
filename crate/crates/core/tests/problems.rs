use normgrad::problems::{
    check_descent_inequality, check_grad_bound, finite_diff_grad, local_holder_constant,
    sample_holder_constant, Family, Problem, ProblemConfig,
};
use normgrad::vector::{l2_norm, Vector};
use proptest::prelude::*;

fn families() -> Vec<Family> {
    vec![
        Family::Quadratic,
        Family::PowerNorm { nu: 0.0 },
        Family::PowerNorm { nu: 0.3 },
        Family::PowerNorm { nu: 1.0 },
        Family::L2Norm { scale: 2.5 },
        Family::Huber { delta: 0.7 },
        Family::LogSumExp,
    ]
}

/// Direct textbook formulas, written without any of the library's
/// cancellation-avoiding rewrites.
fn oracle_value(fam: Family, r: &[f64]) -> f64 {
    let n = r.iter().map(|c| c * c).sum::<f64>().sqrt();
    match fam {
        Family::Quadratic => 0.5 * n * n,
        Family::PowerNorm { nu } => n.powf(1.0 + nu) / (1.0 + nu),
        Family::L2Norm { scale } => scale * n,
        Family::Huber { delta } => {
            if n <= delta {
                n * n / (2.0 * delta)
            } else {
                n - delta / 2.0
            }
        }
        Family::LogSumExp => (r.iter().map(|c| c.cosh()).sum::<f64>() / r.len() as f64).ln(),
    }
}

fn oracle_grad(fam: Family, r: &[f64]) -> Vec<f64> {
    let n = r.iter().map(|c| c * c).sum::<f64>().sqrt();
    match fam {
        Family::Quadratic => r.to_vec(),
        Family::PowerNorm { nu } => r.iter().map(|c| c * n.powf(nu - 1.0)).collect(),
        Family::L2Norm { scale } => r.iter().map(|c| scale * c / n).collect(),
        Family::Huber { delta } => r.iter().map(|c| if n <= delta { c / delta } else { c / n }).collect(),
        Family::LogSumExp => {
            let s: f64 = r.iter().map(|c| c.cosh()).sum();
            r.iter().map(|c| c.sinh() / s).collect()
        }
    }
}

fn problem(fam: Family, xstar: &[f64], optimum: f64) -> Problem {
    Problem::new(fam, Vector::new(xstar.to_vec()).unwrap(), optimum).unwrap()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn values_and_gradients_match_formulas(
        xstar in prop::collection::vec(-1.0f64..1.0, 1..6),
        shift in prop::collection::vec(-5.0f64..5.0, 6),
        optimum in -3.0f64..3.0,
    ) {
        let x: Vec<f64> = xstar.iter().zip(&shift).map(|(a, s)| a + s).collect();
        let r: Vec<f64> = x.iter().zip(&xstar).map(|(a, b)| a - b).collect();
        prop_assume!(r.iter().map(|c| c * c).sum::<f64>() > 1e-8);
        for fam in families() {
            let p = problem(fam, &xstar, optimum);
            let xv = Vector::new(x.clone()).unwrap();
            prop_assert!(close(p.eval(&xv).unwrap(), optimum + oracle_value(fam, &r), 1e-12), "{fam}");
            let g = p.grad(&xv).unwrap();
            for (a, b) in g.iter().zip(oracle_grad(fam, &r)) {
                prop_assert!(close(*a, b, 1e-10), "{fam}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn descent_and_gradient_bound_hold(
        xstar in prop::collection::vec(-1.0f64..1.0, 3),
        a in prop::collection::vec(-10.0f64..10.0, 3),
        b in prop::collection::vec(-10.0f64..10.0, 3),
    ) {
        let x = Vector::new(a).unwrap();
        let y = Vector::new(b).unwrap();
        for fam in families() {
            let p = problem(fam, &xstar, 0.0);
            prop_assert!(check_descent_inequality(&p, &x, &y).unwrap().passed, "{fam}");
            if p.spec().nu > 0.0 {
                prop_assert!(check_grad_bound(&p, &x).unwrap().passed, "{fam}");
            }
        }
    }

    #[test]
    fn local_constant_never_exceeds_declared(
        xstar in prop::collection::vec(-1.0f64..1.0, 4),
        a in prop::collection::vec(-10.0f64..10.0, 4),
    ) {
        let x = Vector::new(a).unwrap();
        for fam in families() {
            let p = problem(fam, &xstar, 0.0);
            if let Ok(l) = local_holder_constant(&p, &x) {
                prop_assert!(l <= p.spec().l_nu * (1.0 + 1e-9) + 1e-12, "{fam}: {l}");
            }
        }
    }
}

#[test]
fn finite_differences_agree_away_from_kinks() {
    let xstar = [0.2, -0.4, 0.9];
    let points = [[1.0, 2.0, -3.0], [0.3, -0.3, 1.1], [-4.0, 0.5, 0.0]];
    for fam in families() {
        let p = problem(fam, &xstar, 0.0);
        for pt in points {
            let x = Vector::new(pt.to_vec()).unwrap();
            if p.distance_to_nonsmooth(&x).unwrap() < 1e-3 {
                continue;
            }
            let g = p.grad(&x).unwrap();
            let fd = finite_diff_grad(&p, &x, 1e-6).unwrap();
            let err = l2_norm(&fd.sub(&g).unwrap()) / l2_norm(&g).max(1.0);
            assert!(err <= 1e-5, "{fam} at {pt:?}: {err}");
        }
    }
}

#[test]
fn sampled_constants_approach_but_respect_declared() {
    for p in Problem::suite(3, 2) {
        let est = sample_holder_constant(&p, 5000, 1).unwrap();
        assert!(est <= p.spec().l_nu + 1e-9, "{}: {est}", p.family());
        assert!(est > 0.0);
    }
}

#[test]
fn config_records_roundtrip() {
    let text = r#"{"family":"huber","parameters":{"delta":0.5},"dimension":2,"minimizer":[1.0,-1.0],"optimum":3.0}"#;
    let cfg: ProblemConfig = serde_json::from_str(text).unwrap();
    let p = Problem::from_config(&cfg).unwrap();
    assert_eq!(p.family(), Family::Huber { delta: 0.5 });
    assert_eq!(p.optimum(), 3.0);
    assert_eq!(p.eval(&Vector::new(vec![1.0, -1.0]).unwrap()).unwrap(), 3.0);
    let back: ProblemConfig = serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
    assert_eq!(back, cfg);

    let seeded: ProblemConfig = serde_json::from_str(r#"{"family":"log_sum_exp","dimension":5,"seed":4}"#).unwrap();
    let a = Problem::from_config(&seeded).unwrap();
    let b = Problem::from_config(&seeded).unwrap();
    assert_eq!(a.minimizer(), b.minimizer());
    assert!(a.minimizer().iter().all(|c| c.abs() <= 1.0));
}

#[test]
fn large_arguments_stay_finite() {
    let p = problem(Family::LogSumExp, &[0.0, 0.0], 0.0);
    let x = Vector::new(vec![800.0, -5.0]).unwrap();
    let v = p.eval(&x).unwrap();
    assert!(close(v, 800.0 - 2f64.ln() - 2f64.ln(), 1e-12), "{v}");
    assert!(p.grad(&x).unwrap().iter().all(|c| c.is_finite()));
}
