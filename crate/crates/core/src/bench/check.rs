//! Seeded property suites over the shipped problems, learners, and drivers.
//!
//! Each suite reports how many samples it drew, how many failed, and the
//! smallest normalized slack it saw. Some suites measure slack before their
//! tolerance is applied, so a tiny negative slack can still pass.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::learners::{LearnerConfig, LearnerKind};
use crate::problems::{
    check_descent_inequality, check_grad_bound, finite_diff_grad, local_holder_constant,
    sample_holder_constant, sample_point, Problem, DEFAULT_SAMPLE_RADIUS,
};
use crate::reduction::{bound_report, hm_gm_am, run_normalized, DEFAULT_EPS_ZERO};
use crate::vector::{axpy, l2_norm, Vector};

/// Relative tolerance of the finite-difference gradient comparison.
pub const FINITE_DIFF_TOLERANCE: f64 = 1e-5;
/// Central-difference step.
pub const FINITE_DIFF_STEP: f64 = 1e-6;
/// Minimum distance of finite-difference points from nonsmooth sets.
pub const NONSMOOTH_EXCLUSION: f64 = 1e-3;
/// Relative tolerance of the mean ordering.
pub const MEANS_TOLERANCE: f64 = 1e-12;
/// Absolute tolerance of convexity, sampled-constant, and iterate checks.
pub const ABSOLUTE_SLACK: f64 = 1e-9;
/// Absolute tolerance of the weighted-regret chain.
pub const REGRET_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Descent,
    GradBound,
    Means,
    FiniteDiff,
    HolderConstant,
    Convexity,
    LocalConstant,
    BoundedIterates,
    ReductionChain,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::Descent,
        Suite::GradBound,
        Suite::Means,
        Suite::FiniteDiff,
        Suite::HolderConstant,
        Suite::Convexity,
        Suite::LocalConstant,
        Suite::BoundedIterates,
        Suite::ReductionChain,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Descent => "descent",
            Suite::GradBound => "grad-bound",
            Suite::Means => "means",
            Suite::FiniteDiff => "finite-diff",
            Suite::HolderConstant => "holder-constant",
            Suite::Convexity => "convexity",
            Suite::LocalConstant => "local-constant",
            Suite::BoundedIterates => "bounded-iterates",
            Suite::ReductionChain => "reduction-chain",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Suite::ALL.iter().map(|x| x.name()).collect();
                Error::Config(format!("unknown suite `{s}`, expected one of {}", names.join(", ")))
            })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOptions {
    /// Samples per family for the pointwise suites.
    pub samples: usize,
    pub seed: u64,
    pub dimension: usize,
    /// Multiplies every declared Hölder constant; values below 1 act as a
    /// negative control.
    pub l_nu_scale: f64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self {
            samples: 10_000,
            seed: 0,
            dimension: 4,
            l_nu_scale: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub samples: usize,
    pub failures: usize,
    pub worst_slack: f64,
    pub worst_offender: Option<String>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub suites: Vec<SuiteReport>,
    pub passed: bool,
}

struct Tally {
    suite: Suite,
    samples: usize,
    failures: usize,
    worst_slack: f64,
    worst_offender: Option<String>,
    offender_slack: f64,
}

impl Tally {
    fn new(suite: Suite) -> Self {
        Self {
            suite,
            samples: 0,
            failures: 0,
            worst_slack: f64::INFINITY,
            worst_offender: None,
            offender_slack: f64::INFINITY,
        }
    }

    /// Records one sample with normalized slack `slack`; `ok` decides pass/fail.
    fn record(&mut self, ok: bool, slack: f64, describe: impl FnOnce() -> String) {
        self.samples += 1;
        if !ok {
            self.failures += 1;
            if self.worst_offender.is_none() || slack < self.offender_slack {
                self.offender_slack = slack;
                self.worst_offender = Some(describe());
            }
        }
        self.worst_slack = self.worst_slack.min(slack);
    }

    fn finish(self) -> SuiteReport {
        SuiteReport {
            suite: self.suite,
            samples: self.samples,
            failures: self.failures,
            worst_slack: if self.samples == 0 { 0.0 } else { self.worst_slack },
            worst_offender: self.worst_offender,
            passed: self.failures == 0 && self.samples > 0,
        }
    }
}

fn problems(opts: &CheckOptions) -> Result<Vec<Problem>> {
    Problem::suite(opts.dimension, opts.seed)
        .into_iter()
        .map(|p| {
            let l = p.spec().l_nu * opts.l_nu_scale;
            p.with_declared_l_nu(l)
        })
        .collect()
}

fn rng_for(opts: &CheckOptions, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(opts.seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(salt))
}

fn fmt_point(x: &Vector) -> String {
    format!("{:?}", x.as_slice())
}

fn descent(opts: &CheckOptions) -> Result<SuiteReport> {
    let mut tally = Tally::new(Suite::Descent);
    for (i, p) in problems(opts)?.iter().enumerate() {
        let mut rng = rng_for(opts, 100 + i as u64);
        for _ in 0..opts.samples {
            let x = sample_point(p, &mut rng, DEFAULT_SAMPLE_RADIUS);
            let y = sample_point(p, &mut rng, DEFAULT_SAMPLE_RADIUS);
            let out = check_descent_inequality(p, &x, &y)?;
            let scale = 1.0 + p.eval(&y)?.abs();
            tally.record(out.passed, out.residual / scale, || {
                format!("{} x={} y={} residual={}", p.family(), fmt_point(&x), fmt_point(&y), out.residual)
            });
        }
    }
    Ok(tally.finish())
}

fn grad_bound(opts: &CheckOptions) -> Result<SuiteReport> {
    let mut tally = Tally::new(Suite::GradBound);
    for (i, p) in problems(opts)?.iter().enumerate() {
        if p.spec().nu == 0.0 {
            continue;
        }
        let mut rng = rng_for(opts, 200 + i as u64);
        for _ in 0..opts.samples {
            let x = sample_point(p, &mut rng, DEFAULT_SAMPLE_RADIUS);
            let out = check_grad_bound(p, &x)?;
            let scale = 1.0 + (out.residual.abs()).max(l2_norm(&p.grad(&x)?));
            tally.record(out.passed, out.residual / scale, || {
                format!("{} x={} residual={}", p.family(), fmt_point(&x), out.residual)
            });
        }
    }
    Ok(tally.finish())
}

fn means(opts: &CheckOptions) -> Result<SuiteReport> {
    let mut tally = Tally::new(Suite::Means);
    let mut rng = rng_for(opts, 300);
    for _ in 0..opts.samples {
        let len = rng.gen_range(1..=64);
        let values: Vec<f64> = (0..len).map(|_| 10f64.powf(rng.gen_range(-6.0..6.0))).collect();
        let m = hm_gm_am(&values)?;
        let slack = ((m.geometric * (1.0 + MEANS_TOLERANCE) - m.harmonic) / m.geometric)
            .min((m.arithmetic * (1.0 + MEANS_TOLERANCE) - m.geometric) / m.arithmetic);
        tally.record(slack >= 0.0, slack, || format!("len={len} means={m:?}"));
    }
    Ok(tally.finish())
}

fn finite_diff(opts: &CheckOptions) -> Result<SuiteReport> {
    let mut tally = Tally::new(Suite::FiniteDiff);
    for (i, p) in problems(opts)?.iter().enumerate() {
        let mut rng = rng_for(opts, 400 + i as u64);
        let mut drawn = 0;
        while drawn < opts.samples {
            let x = sample_point(p, &mut rng, DEFAULT_SAMPLE_RADIUS);
            if p.distance_to_nonsmooth(&x)? < NONSMOOTH_EXCLUSION {
                continue;
            }
            drawn += 1;
            let g = p.grad(&x)?;
            let fd = finite_diff_grad(p, &x, FINITE_DIFF_STEP)?;
            let err = l2_norm(&fd.sub(&g)?) / l2_norm(&g).max(1.0);
            tally.record(err <= FINITE_DIFF_TOLERANCE, FINITE_DIFF_TOLERANCE - err, || {
                format!("{} x={} relative error={err}", p.family(), fmt_point(&x))
            });
        }
    }
    Ok(tally.finish())
}

fn holder_constant(opts: &CheckOptions) -> Result<SuiteReport> {
    let mut tally = Tally::new(Suite::HolderConstant);
    for p in problems(opts)? {
        for k in 0..10u64 {
            let seed = opts.seed.wrapping_mul(31).wrapping_add(k);
            let est = sample_holder_constant(&p, opts.samples, seed)?;
            let slack = p.spec().l_nu + ABSOLUTE_SLACK - est;
            tally.record(slack >= 0.0, slack, || {
                format!("{} seed={seed} sampled constant {est} > declared {}", p.family(), p.spec().l_nu)
            });
        }
    }
    Ok(tally.finish())
}

fn convexity(opts: &CheckOptions) -> Result<SuiteReport> {
    let mut tally = Tally::new(Suite::Convexity);
    let segments = (opts.samples / 10).max(1);
    for (i, p) in problems(opts)?.iter().enumerate() {
        let mut rng = rng_for(opts, 500 + i as u64);
        for _ in 0..segments {
            let x = sample_point(p, &mut rng, DEFAULT_SAMPLE_RADIUS);
            let y = sample_point(p, &mut rng, DEFAULT_SAMPLE_RADIUS);
            let lambda: f64 = rng.gen();
            let z = axpy(1.0 - lambda, &y.sub(&x)?, &x)?;
            let slack = lambda * p.eval(&x)? + (1.0 - lambda) * p.eval(&y)? + ABSOLUTE_SLACK - p.eval(&z)?;
            tally.record(slack >= 0.0, slack, || {
                format!("{} x={} y={} lambda={lambda}", p.family(), fmt_point(&x), fmt_point(&y))
            });
        }
    }
    Ok(tally.finish())
}

fn local_constant(opts: &CheckOptions) -> Result<SuiteReport> {
    let mut tally = Tally::new(Suite::LocalConstant);
    for (i, p) in problems(opts)?.iter().enumerate() {
        let mut rng = rng_for(opts, 600 + i as u64);
        for _ in 0..opts.samples {
            let x = sample_point(p, &mut rng, DEFAULT_SAMPLE_RADIUS);
            let l = match local_holder_constant(p, &x) {
                Ok(l) => l,
                Err(Error::DegeneratePoint) => continue,
                Err(e) => return Err(e),
            };
            let slack = p.spec().l_nu + ABSOLUTE_SLACK - l;
            tally.record(slack >= 0.0, slack, || {
                format!("{} x={} local constant {l} > {}", p.family(), fmt_point(&x), p.spec().l_nu)
            });
        }
    }
    Ok(tally.finish())
}

fn random_start(p: &Problem, rng: &mut ChaCha8Rng, max_dist: f64) -> Result<Vector> {
    let dir = sample_point(&Problem::quadratic(Vector::zeros(p.dim())), rng, 1.0);
    let n = l2_norm(&dir).max(1e-12);
    let dist = rng.gen_range(0.0..max_dist);
    axpy(dist / n, &dir, p.minimizer())
}

const CHAIN_HORIZONS: [usize; 9] = [16, 32, 64, 128, 256, 512, 1024, 2048, 4096];

fn bounded_iterates(opts: &CheckOptions) -> Result<SuiteReport> {
    let mut tally = Tally::new(Suite::BoundedIterates);
    for (i, p) in problems(opts)?.iter().enumerate() {
        let mut rng = rng_for(opts, 700 + i as u64);
        for &horizon in &CHAIN_HORIZONS[..7] {
            for _ in 0..3 {
                let alpha = 10f64.powf(rng.gen_range(-1.0..1.0));
                let start = random_start(p, &mut rng, 10.0)?;
                let cfg = LearnerConfig::ogd_const(alpha, horizon, start);
                let run = run_normalized(&cfg, p, horizon, DEFAULT_EPS_ZERO)?;
                let d = cfg.start.distance(p.minimizer())?;
                let limit = d * d + alpha * alpha + ABSOLUTE_SLACK;
                let slack = limit - run.max_sq_distance(p.minimizer())?;
                tally.record(slack >= 0.0, slack, || {
                    format!("{} T={horizon} alpha={alpha} max distance exceeds limit {limit}", p.family())
                });
            }
        }
    }
    Ok(tally.finish())
}

fn reduction_chain(opts: &CheckOptions) -> Result<SuiteReport> {
    let mut tally = Tally::new(Suite::ReductionChain);
    for (i, p) in problems(opts)?.iter().enumerate() {
        let mut rng = rng_for(opts, 800 + i as u64);
        let start = random_start(p, &mut rng, 5.0)?;
        for kind in [LearnerKind::OgdConst, LearnerKind::DaSqrt, LearnerKind::Kt] {
            for &horizon in &CHAIN_HORIZONS {
                let cfg = match kind {
                    LearnerKind::OgdConst => LearnerConfig::ogd_const(1.0, horizon, start.clone()),
                    LearnerKind::DaSqrt => LearnerConfig::da_sqrt(1.0, start.clone()),
                    _ => LearnerConfig::kt(1.0, start.clone()),
                };
                let run = run_normalized(&cfg, p, horizon, DEFAULT_EPS_ZERO)?;
                let report = bound_report(&run, p, &cfg)?;
                let describe = |what: &str| format!("{} {kind} T={horizon}: {what}", p.family());

                // Jensen step: the weighted gap average dominates the gap of the weighted average.
                if run.steps_taken() > 0 {
                    let wsum: f64 = run.weights.iter().sum();
                    let weighted_gap: f64 = run
                        .suboptimalities
                        .iter()
                        .zip(&run.weights)
                        .map(|(g, w)| g * w)
                        .sum::<f64>();
                    let slack = weighted_gap / wsum + ABSOLUTE_SLACK - report.measured;
                    tally.record(slack >= 0.0, slack, || describe("Jensen step"));
                    let slack = report.psi_at_xstar + REGRET_SLACK - weighted_gap;
                    tally.record(slack >= 0.0, slack / (1.0 + report.psi_at_xstar), || {
                        describe("weighted gaps exceed the regret bound")
                    });
                }
                let violations = report.violations();
                let slack = [
                    Some(report.closed_form_bound - report.measured),
                    report.bound_gm.map(|gm| gm - report.measured),
                    report.bound_gm.zip(report.bound_am).map(|(gm, am)| am - gm),
                ]
                .into_iter()
                .flatten()
                .fold(f64::INFINITY, f64::min);
                tally.record(violations.is_empty(), slack, || describe(&violations.join("; ")));
            }
        }
    }
    Ok(tally.finish())
}

pub fn run_suite(suite: Suite, opts: &CheckOptions) -> Result<SuiteReport> {
    match suite {
        Suite::Descent => descent(opts),
        Suite::GradBound => grad_bound(opts),
        Suite::Means => means(opts),
        Suite::FiniteDiff => finite_diff(opts),
        Suite::HolderConstant => holder_constant(opts),
        Suite::Convexity => convexity(opts),
        Suite::LocalConstant => local_constant(opts),
        Suite::BoundedIterates => bounded_iterates(opts),
        Suite::ReductionChain => reduction_chain(opts),
    }
}

/// Runs the selected suite, or all of them.
pub fn run_checks(selector: Option<Suite>, opts: &CheckOptions) -> Result<CheckReport> {
    if opts.samples == 0 {
        return Err(Error::Config("samples must be positive".into()));
    }
    if !(opts.l_nu_scale > 0.0) {
        return Err(Error::Config("l_nu scale must be positive".into()));
    }
    let suites = match selector {
        Some(s) => vec![s],
        None => Suite::ALL.to_vec(),
    };
    let reports = suites
        .into_iter()
        .map(|s| run_suite(s, opts))
        .collect::<Result<Vec<_>>>()?;
    let passed = reports.iter().all(|r| r.passed);
    Ok(CheckReport {
        suites: reports,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> CheckOptions {
        CheckOptions {
            samples: 200,
            ..CheckOptions::default()
        }
    }

    #[test]
    fn suite_names_roundtrip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn small_suites_pass() {
        let report = run_checks(None, &small()).unwrap();
        for s in &report.suites {
            assert!(s.passed, "{s:?}");
        }
    }

    #[test]
    fn halved_constant_fails_descent() {
        let opts = CheckOptions {
            l_nu_scale: 0.5,
            ..small()
        };
        let report = run_checks(Some(Suite::Descent), &opts).unwrap();
        assert!(!report.passed);
        assert!(report.suites[0].worst_offender.is_some());
        assert!(report.suites[0].worst_slack < 0.0);
    }

    #[test]
    fn rejects_bad_options() {
        let opts = CheckOptions {
            samples: 0,
            ..CheckOptions::default()
        };
        assert!(run_checks(None, &opts).is_err());
    }
}
