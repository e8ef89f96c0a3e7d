//! The normalized-gradient reduction and its bounds.
//!
//! [`run_normalized`] turns any unit-loss online learner into an optimizer:
//! it queries the learner for `x_t`, feeds it `g_t/‖g_t‖`, and returns the
//! average of the iterates weighted by `1/‖g_t‖`. [`run_adagrad_warmup`] is
//! the raw-gradient counterpart with a uniform average.
//!
//! The bound side composes a learner's regret bound `ψ_T` with the local
//! smoothness of the iterates ([`local_smoothness_bound`]) or with the global
//! Hölder constants ([`closed_form_rate`]).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::learners::{Learner, LearnerConfig, LearnerKind};
use crate::problems::{local_holder_constant, HolderSpec, Problem};
use crate::vector::{l2_norm, Vector, WeightedMean};

/// Gradients at or below this norm are treated as zero and stop the run.
pub const DEFAULT_EPS_ZERO: f64 = 1e-12;

/// Relative slack used when comparing measured gaps against bounds.
pub const BOUND_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub kind: LearnerKind,
    pub horizon: usize,
    /// Iterates that produced a loss, `x_1, x_2, …`.
    pub iterates: Vec<Vector>,
    pub grad_norms: Vec<f64>,
    pub suboptimalities: Vec<f64>,
    /// Averaging weight of each recorded iterate.
    pub weights: Vec<f64>,
    pub average_point: Vector,
    pub average_suboptimality: f64,
    /// Step `t` whose gradient vanished, if the run stopped early.
    pub early_stop: Option<usize>,
    /// Set when a raw gradient exceeded the AdaGrad-norm bound `G`.
    pub grad_bound_exceeded: bool,
}

impl RunRecord {
    pub fn terminated_early(&self) -> bool {
        self.early_stop.is_some()
    }

    /// Number of losses fed to the learner.
    pub fn steps_taken(&self) -> usize {
        self.grad_norms.len()
    }

    /// `max_t ‖x_t − x*‖²` over the recorded iterates and, after an early
    /// stop, the returned point.
    pub fn max_sq_distance(&self, xstar: &Vector) -> Result<f64> {
        let mut best = 0.0f64;
        for x in self.iterates.iter().chain(self.early_stop.map(|_| &self.average_point)) {
            best = best.max(x.distance(xstar)?.powi(2));
        }
        Ok(best)
    }
}

fn gap(p: &Problem, x: &Vector, step: usize) -> Result<f64> {
    let v = p.eval(x).map_err(|e| match e {
        Error::NonFinite(what) => Error::NumericalFailure { step, what },
        e => e,
    })?;
    Ok((v - p.optimum()).max(0.0))
}

fn checked_grad(p: &Problem, x: &Vector, step: usize) -> Result<(Vector, f64)> {
    let g = p.grad(x).map_err(|e| match e {
        Error::NonFinite(what) => Error::NumericalFailure { step, what },
        e => e,
    })?;
    let n = l2_norm(&g);
    if !n.is_finite() {
        return Err(Error::NumericalFailure {
            step,
            what: "gradient norm",
        });
    }
    Ok((g, n))
}

fn check_start(cfg: &LearnerConfig, p: &Problem, horizon: usize) -> Result<()> {
    if horizon == 0 {
        return Err(Error::contract("horizon must be at least 1"));
    }
    cfg.start.check_dim(p.minimizer())?;
    if cfg.kind == LearnerKind::OgdConst && cfg.horizon()? != horizon {
        return Err(Error::contract(format!(
            "ogd_const is configured for horizon {} but the run asks for {horizon}",
            cfg.horizon()?
        )));
    }
    Ok(())
}

/// Runs the normalized-gradient reduction for at most `horizon` steps.
pub fn run_normalized(
    cfg: &LearnerConfig,
    p: &Problem,
    horizon: usize,
    eps_zero: f64,
) -> Result<RunRecord> {
    if !cfg.kind.unit_losses() {
        return Err(Error::WrongDriver(cfg.kind.name()));
    }
    if !(eps_zero > 0.0) {
        return Err(Error::contract(format!("eps_zero must be positive, got {eps_zero}")));
    }
    check_start(cfg, p, horizon)?;
    let mut learner = Learner::new(cfg.clone())?;
    let mut avg = WeightedMean::new(p.dim());
    let mut rec = RunRecord {
        kind: cfg.kind,
        horizon,
        iterates: Vec::with_capacity(horizon),
        grad_norms: Vec::with_capacity(horizon),
        suboptimalities: Vec::with_capacity(horizon),
        weights: Vec::with_capacity(horizon),
        average_point: cfg.start.clone(),
        average_suboptimality: 0.0,
        early_stop: None,
        grad_bound_exceeded: false,
    };

    for t in 1..=horizon {
        let x = learner.next_point();
        let (g, norm) = checked_grad(p, &x, t)?;
        if norm <= eps_zero {
            rec.early_stop = Some(t);
            rec.average_point = x;
            break;
        }
        let w = 1.0 / norm;
        avg.push(&x, w)?;
        rec.suboptimalities.push(gap(p, &x, t)?);
        rec.grad_norms.push(norm);
        rec.weights.push(w);
        rec.iterates.push(x);
        learner.observe(&g.scale(w))?;
    }

    if rec.early_stop.is_none() {
        rec.average_point = avg.finalize()?;
    }
    rec.average_suboptimality = gap(p, &rec.average_point, horizon)?;
    Ok(rec)
}

/// Runs AdaGrad-norm dual averaging on raw gradients for exactly `horizon`
/// steps and returns the uniform average of the iterates.
pub fn run_adagrad_warmup(cfg: &LearnerConfig, p: &Problem, horizon: usize) -> Result<RunRecord> {
    if cfg.kind != LearnerKind::AdaGradDa {
        return Err(Error::WrongDriver(cfg.kind.name()));
    }
    check_start(cfg, p, horizon)?;
    let bound = cfg.grad_bound_init()?;
    let mut learner = Learner::new(cfg.clone())?;
    let mut avg = WeightedMean::new(p.dim());
    let mut rec = RunRecord {
        kind: cfg.kind,
        horizon,
        iterates: Vec::with_capacity(horizon),
        grad_norms: Vec::with_capacity(horizon),
        suboptimalities: Vec::with_capacity(horizon),
        weights: Vec::with_capacity(horizon),
        average_point: cfg.start.clone(),
        average_suboptimality: 0.0,
        early_stop: None,
        grad_bound_exceeded: false,
    };
    for t in 1..=horizon {
        let x = learner.next_point();
        let (g, norm) = checked_grad(p, &x, t)?;
        if norm > bound + crate::learners::UNIT_NORM_TOLERANCE {
            rec.grad_bound_exceeded = true;
        }
        avg.push(&x, 1.0)?;
        rec.suboptimalities.push(gap(p, &x, t)?);
        rec.grad_norms.push(norm);
        rec.weights.push(1.0);
        rec.iterates.push(x);
        learner.accumulate(&g)?;
    }
    rec.average_point = avg.finalize()?;
    rec.average_suboptimality = gap(p, &rec.average_point, horizon)?;
    Ok(rec)
}

/// Dispatches to the driver matching the learner kind.
pub fn run(cfg: &LearnerConfig, p: &Problem, horizon: usize, eps_zero: f64) -> Result<RunRecord> {
    if cfg.kind.unit_losses() {
        run_normalized(cfg, p, horizon, eps_zero)
    } else {
        run_adagrad_warmup(cfg, p, horizon)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Means {
    pub harmonic: f64,
    pub geometric: f64,
    pub arithmetic: f64,
}

/// Harmonic, geometric (via the mean of logarithms), and arithmetic means.
pub fn hm_gm_am(values: &[f64]) -> Result<Means> {
    if values.is_empty() {
        return Err(Error::contract("means of an empty sequence"));
    }
    if let Some(bad) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
        return Err(Error::contract(format!("means need positive finite values, got {bad}")));
    }
    let n = values.len() as f64;
    Ok(Means {
        harmonic: n / values.iter().map(|v| 1.0 / v).sum::<f64>(),
        geometric: (values.iter().map(|v| v.ln()).sum::<f64>() / n).exp(),
        arithmetic: values.iter().sum::<f64>() / n,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeanKind {
    Geometric,
    Arithmetic,
}

/// `α^nu (ψ/T)^(1+nu) · M`, where `M` is the geometric or arithmetic mean of
/// the local smoothness constants of the iterates and `α = holder_alpha`.
pub fn local_smoothness_bound(
    psi_at_xstar: f64,
    steps: usize,
    spec: &HolderSpec,
    local_constants: &[f64],
    mean: MeanKind,
) -> Result<f64> {
    if !(psi_at_xstar >= 0.0) {
        return Err(Error::contract(format!("psi must be nonnegative, got {psi_at_xstar}")));
    }
    if steps == 0 || local_constants.len() > steps {
        return Err(Error::contract(format!(
            "{} local constants do not fit in {steps} steps",
            local_constants.len()
        )));
    }
    let means = hm_gm_am(local_constants)?;
    let m = match mean {
        MeanKind::Geometric => means.geometric,
        MeanKind::Arithmetic => means.arithmetic,
    };
    Ok(spec.alpha_pow_nu() * (psi_at_xstar / steps as f64).powf(1.0 + spec.nu) * m)
}

/// Deterministic upper bound on `f(x̄_T) − f*` for the given learner on `p`
/// after `horizon` steps, using only global constants of `p`.
pub fn closed_form_rate(p: &Problem, cfg: &LearnerConfig, horizon: usize) -> Result<f64> {
    check_start(cfg, p, horizon)?;
    let dist = cfg.start.distance(p.minimizer())?;
    let nu = p.spec().nu;
    let c = p.rate_constant();
    let t = horizon as f64;
    match cfg.kind {
        LearnerKind::OgdConst | LearnerKind::DaSqrt | LearnerKind::Kt => {
            let psi = cfg.regret_bound(dist, horizon, None)?;
            Ok(c * (psi / t).powf(1.0 + nu))
        }
        LearnerKind::AdaGradDa => {
            let a = cfg.step_scale()?;
            let g = cfg.grad_bound_init()?;
            let scale = dist * dist / a + 2.0 * a;
            let smooth_branch = c * scale.powf(1.0 + nu) * t.powf((1.0 - nu) / 2.0) / t;
            let bounded_branch = g / t * scale;
            Ok(smooth_branch.max(bounded_branch))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub psi_at_xstar: f64,
    /// Local-smoothness bound with the geometric mean. Absent for AdaGrad-norm runs.
    pub bound_gm: Option<f64>,
    /// Same with the arithmetic mean.
    pub bound_am: Option<f64>,
    pub closed_form_bound: f64,
    pub measured: f64,
    pub local_constants: Vec<f64>,
}

fn within(value: f64, bound: f64) -> bool {
    value <= bound + BOUND_SLACK * (1.0 + bound.abs())
}

impl BoundReport {
    /// Descriptions of every violated bound relation; empty when all hold.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !within(self.measured, self.closed_form_bound) {
            out.push(format!(
                "measured {} exceeds closed-form bound {}",
                self.measured, self.closed_form_bound
            ));
        }
        if let (Some(gm), Some(am)) = (self.bound_gm, self.bound_am) {
            if !within(self.measured, gm) {
                out.push(format!("measured {} exceeds geometric-mean bound {gm}", self.measured));
            }
            if !within(gm, am) {
                out.push(format!("geometric-mean bound {gm} exceeds arithmetic-mean bound {am}"));
            }
        }
        out
    }

    pub fn holds(&self) -> bool {
        self.violations().is_empty()
    }
}

/// Evaluates every bound that applies to `run` and packages it with the
/// measured gap of the averaged point.
pub fn bound_report(run: &RunRecord, p: &Problem, cfg: &LearnerConfig) -> Result<BoundReport> {
    let dist = cfg.start.distance(p.minimizer())?;
    let mut local_constants = Vec::with_capacity(run.iterates.len());
    for x in &run.iterates {
        match local_holder_constant(p, x) {
            Ok(l) => local_constants.push(l),
            Err(Error::DegeneratePoint) => {}
            Err(e) => return Err(e),
        }
    }
    let closed_form_bound = closed_form_rate(p, cfg, run.horizon)?;

    let (psi_at_xstar, bound_gm, bound_am) = if cfg.kind.unit_losses() {
        let psi = cfg.regret_bound(dist, run.horizon, None)?;
        if local_constants.is_empty() {
            // Only possible after an early stop, where the measured gap is zero.
            (psi, Some(0.0), Some(0.0))
        } else {
            let steps = run.steps_taken();
            let spec = p.spec();
            (
                psi,
                Some(local_smoothness_bound(psi, steps, spec, &local_constants, MeanKind::Geometric)?),
                Some(local_smoothness_bound(psi, steps, spec, &local_constants, MeanKind::Arithmetic)?),
            )
        }
    } else {
        let sq: f64 = run.grad_norms.iter().map(|n| n * n).sum();
        (cfg.regret_bound(dist, run.horizon, Some(sq))?, None, None)
    };

    Ok(BoundReport {
        psi_at_xstar,
        bound_gm,
        bound_am,
        closed_form_bound,
        measured: run.average_suboptimality,
        local_constants,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(c: &[f64]) -> Vector {
        Vector::new(c.to_vec()).unwrap()
    }

    #[test]
    fn ogd_quadratic_stops_at_the_minimizer() {
        let p = Problem::quadratic(v(&[0.0]));
        let cfg = LearnerConfig::ogd_const(1.0, 4, v(&[1.0]));
        let run = run_normalized(&cfg, &p, 4, DEFAULT_EPS_ZERO).unwrap();
        assert_eq!(run.iterates, vec![v(&[1.0]), v(&[0.5])]);
        assert_eq!(run.early_stop, Some(3));
        assert_eq!(run.average_point, v(&[0.0]));
        assert_eq!(run.steps_taken(), 2);
        assert_eq!(run.average_suboptimality, 0.0);
    }

    #[test]
    fn start_at_minimizer() {
        let p = Problem::huber(1.0, v(&[2.0, -1.0])).unwrap();
        let cfg = LearnerConfig::kt(1.0, v(&[2.0, -1.0]));
        let run = run_normalized(&cfg, &p, 10, DEFAULT_EPS_ZERO).unwrap();
        assert_eq!(run.early_stop, Some(1));
        assert_eq!(run.steps_taken(), 0);
        assert_eq!(&run.average_point, p.minimizer());
        let rep = bound_report(&run, &p, &cfg).unwrap();
        assert_eq!(rep.measured, 0.0);
        assert!(rep.holds());
    }

    #[test]
    fn wrong_driver() {
        let p = Problem::quadratic(v(&[0.0]));
        let ada = LearnerConfig::adagrad_da(1.0, 1.0, v(&[1.0]));
        assert_eq!(
            run_normalized(&ada, &p, 3, DEFAULT_EPS_ZERO).unwrap_err(),
            Error::WrongDriver("ada_grad_da")
        );
        let kt = LearnerConfig::kt(1.0, v(&[1.0]));
        assert!(matches!(run_adagrad_warmup(&kt, &p, 3), Err(Error::WrongDriver(_))));
        let ogd = LearnerConfig::ogd_const(1.0, 8, v(&[1.0]));
        assert!(run_normalized(&ogd, &p, 4, DEFAULT_EPS_ZERO).is_err());
        assert!(run_normalized(&kt, &p, 4, 0.0).is_err());
    }

    #[test]
    fn numerical_failure_carries_the_step() {
        let p = Problem::quadratic(v(&[0.0]));
        let cfg = LearnerConfig::da_sqrt(1e308, v(&[1e308]));
        let err = run_normalized(&cfg, &p, 10, DEFAULT_EPS_ZERO).unwrap_err();
        assert!(matches!(err, Error::NumericalFailure { step: 1, .. }), "{err}");
    }

    #[test]
    fn adagrad_warmup_examples() {
        let p = Problem::quadratic(v(&[0.0]));
        let cfg = LearnerConfig::adagrad_da(1.0, 1.0, v(&[1.0]));
        let run = run_adagrad_warmup(&cfg, &p, 2).unwrap();
        assert_eq!(run.iterates.len(), 2);
        assert!((run.iterates[1][0] - (1.0 - 0.5f64.sqrt())).abs() < 1e-15);
        assert!(!run.grad_bound_exceeded);

        let at_opt = LearnerConfig::adagrad_da(1.0, 1.0, v(&[0.0]));
        let run = run_adagrad_warmup(&at_opt, &p, 5).unwrap();
        assert!(run.iterates.iter().all(|x| x == &v(&[0.0])));
        assert_eq!(run.average_point, v(&[0.0]));

        let small_g = LearnerConfig::adagrad_da(1.0, 0.5, v(&[3.0]));
        let run = run_adagrad_warmup(&small_g, &p, 5).unwrap();
        assert!(run.grad_bound_exceeded);
        assert_eq!(run.steps_taken(), 5);
    }

    #[test]
    fn means_examples() {
        let m = hm_gm_am(&[3.0; 7]).unwrap();
        assert!((m.harmonic - 3.0).abs() < 1e-15);
        assert!((m.geometric - 3.0).abs() < 1e-15);
        assert!((m.arithmetic - 3.0).abs() < 1e-15);

        let m = hm_gm_am(&[1.0, 4.0]).unwrap();
        assert!((m.harmonic - 1.6).abs() < 1e-15);
        assert!((m.geometric - 2.0).abs() < 1e-15);
        assert!((m.arithmetic - 2.5).abs() < 1e-15);

        let m = hm_gm_am(&[1.0, 1e6]).unwrap();
        assert!((m.harmonic - 2e6 / (1e6 + 1.0)).abs() < 1e-12);
        assert!((m.geometric - 1e3).abs() < 1e-9);
        assert!((m.arithmetic - 500_000.5).abs() < 1e-9);
        assert!(m.harmonic < m.geometric && m.geometric < m.arithmetic);

        assert!(hm_gm_am(&[]).is_err());
        assert!(hm_gm_am(&[1.0, 0.0]).is_err());
        assert!(hm_gm_am(&[1.0, -2.0]).is_err());
    }

    #[test]
    fn local_smoothness_bound_examples() {
        let spec = HolderSpec::new(1.0, 1.0).unwrap();
        let b = local_smoothness_bound(10.0, 100, &spec, &[1.0], MeanKind::Geometric).unwrap();
        assert!((b - 0.02).abs() < 1e-15);

        let flat = HolderSpec::new(0.0, 2.0).unwrap();
        let b = local_smoothness_bound(3.0, 12, &flat, &[0.5, 2.0], MeanKind::Arithmetic).unwrap();
        assert!((b - 0.25 * 1.25).abs() < 1e-15);

        let gm = local_smoothness_bound(10.0, 100, &spec, &[1.0, 4.0], MeanKind::Geometric).unwrap();
        let am = local_smoothness_bound(10.0, 100, &spec, &[1.0, 4.0], MeanKind::Arithmetic).unwrap();
        assert!((gm / am - 0.8).abs() < 1e-15);

        assert!(local_smoothness_bound(1.0, 1, &spec, &[1.0, 1.0], MeanKind::Geometric).is_err());
        assert!(local_smoothness_bound(-1.0, 1, &spec, &[1.0], MeanKind::Geometric).is_err());
    }

    #[test]
    fn closed_form_examples() {
        let p = Problem::quadratic(v(&[0.0]));
        let ogd = LearnerConfig::ogd_const(1.0, 100, v(&[1.0]));
        assert!((closed_form_rate(&p, &ogd, 100).unwrap() - 0.02).abs() < 1e-15);
        let ogd4 = LearnerConfig::ogd_const(1.0, 400, v(&[1.0]));
        let ratio = closed_form_rate(&p, &ogd, 100).unwrap() / closed_form_rate(&p, &ogd4, 400).unwrap();
        assert!((ratio - 4.0).abs() < 1e-12);

        // Lipschitz case with α = D: the bound is D/√T.
        let l2 = Problem::l2_norm(v(&[0.0, 0.0]));
        let d = 5.0;
        let ogd = LearnerConfig::ogd_const(d, 64, v(&[3.0, 4.0]));
        assert!((closed_form_rate(&l2, &ogd, 64).unwrap() - d / 8.0).abs() < 1e-14);
        assert!(closed_form_rate(&l2, &ogd, 63).is_err());
    }
}
