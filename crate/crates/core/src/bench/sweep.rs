use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ratefit::{fit_rate, RateFit};
use crate::error::{Error, Result};
use crate::learners::{LearnerConfig, LearnerKind};
use crate::problems::{Family, Problem, ProblemConfig};
use crate::reduction::{bound_report, run, DEFAULT_EPS_ZERO};
use crate::vector::{axpy, Vector};

/// Grid of `(nu, learner, T, seed)` cells, each a PowerNorm problem with
/// exponent `nu` started at distance `distance` from its minimizer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub nus: Vec<f64>,
    pub learners: Vec<LearnerKind>,
    pub horizons: Vec<usize>,
    pub seeds: Vec<u64>,
    pub dimension: usize,
    pub distance: f64,
    /// `α` for ogd_const, da_sqrt, and ada_grad_da.
    pub step_scale: f64,
    /// `d₀` for kt.
    pub wealth_init: f64,
    /// `G` for ada_grad_da.
    pub grad_bound_init: f64,
    pub eps_zero: f64,
}

impl Default for SweepGrid {
    fn default() -> Self {
        Self {
            nus: vec![0.0, 0.5, 1.0],
            learners: LearnerKind::ALL.to_vec(),
            horizons: (8..=14).map(|k| 1usize << k).collect(),
            seeds: vec![0, 1, 2],
            dimension: 10,
            distance: 1.0,
            step_scale: 1.0,
            wealth_init: 1.0,
            grad_bound_init: 2.0,
            eps_zero: DEFAULT_EPS_ZERO,
        }
    }
}

impl SweepGrid {
    pub fn validate(&self) -> Result<()> {
        if self.nus.is_empty() || self.learners.is_empty() || self.horizons.is_empty() || self.seeds.is_empty() {
            return Err(Error::Config("every sweep axis needs at least one value".into()));
        }
        if self.horizons.contains(&0) {
            return Err(Error::Config("horizons must be positive".into()));
        }
        if self.dimension == 0 {
            return Err(Error::Config("dimension must be positive".into()));
        }
        if !(self.distance >= 0.0 && self.distance.is_finite()) {
            return Err(Error::Config(format!("distance must be nonnegative, got {}", self.distance)));
        }
        for &nu in &self.nus {
            if !(0.0..=1.0).contains(&nu) {
                return Err(Error::Config(format!("nu must lie in [0, 1], got {nu}")));
            }
        }
        Ok(())
    }

    pub fn learner_config(&self, kind: LearnerKind, start: Vector, horizon: usize) -> LearnerConfig {
        match kind {
            LearnerKind::OgdConst => LearnerConfig::ogd_const(self.step_scale, horizon, start),
            LearnerKind::DaSqrt => LearnerConfig::da_sqrt(self.step_scale, start),
            LearnerKind::Kt => LearnerConfig::kt(self.wealth_init, start),
            LearnerKind::AdaGradDa => {
                LearnerConfig::adagrad_da(self.step_scale, self.grad_bound_init, start)
            }
        }
    }

    fn cells(&self) -> Vec<(f64, LearnerKind, usize, u64)> {
        let mut out = Vec::new();
        for &nu in &self.nus {
            for &kind in &self.learners {
                for &horizon in &self.horizons {
                    for &seed in &self.seeds {
                        out.push((nu, kind, horizon, seed));
                    }
                }
            }
        }
        out
    }
}

pub fn sweep_problem(nu: f64, dimension: usize, seed: u64) -> Result<Problem> {
    Problem::from_config(&ProblemConfig {
        family: Family::PowerNorm { nu },
        dimension,
        minimizer: None,
        optimum: 0.0,
        seed,
    })
}

/// Start point at `distance` from the minimizer in a seeded random direction.
pub fn sweep_start(p: &Problem, distance: f64, seed: u64) -> Result<Vector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_57a7);
    let dir = unit_direction(&mut rng, p.dim());
    axpy(distance, &dir, p.minimizer())
}

/// One sweep cell. Bound columns follow the summary schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub nu: f64,
    pub learner: LearnerKind,
    #[serde(rename = "T")]
    pub horizon: usize,
    pub seed: u64,
    pub steps_taken: usize,
    pub terminated_early: bool,
    pub f_gap_avg: f64,
    pub psi_at_xstar: f64,
    pub bound_gm: Option<f64>,
    pub bound_am: Option<f64>,
    pub bound_closed_form: f64,
    /// `max_t ‖x_t − x*‖²`.
    pub max_sq_dist: f64,
    /// `‖x₁ − x*‖² + α²`, reported for ogd_const only.
    pub iterate_bound: Option<f64>,
    pub grad_bound_exceeded: bool,
    pub bounds_hold: bool,
}

fn run_cell(grid: &SweepGrid, nu: f64, kind: LearnerKind, horizon: usize, seed: u64) -> Result<SweepRow> {
    let p = sweep_problem(nu, grid.dimension, seed)?;
    let start = sweep_start(&p, grid.distance, seed)?;
    let cfg = grid.learner_config(kind, start, horizon);
    let record = run(&cfg, &p, horizon, grid.eps_zero)?;
    let report = bound_report(&record, &p, &cfg)?;
    let dist = cfg.start.distance(p.minimizer())?;
    Ok(SweepRow {
        nu,
        learner: kind,
        horizon,
        seed,
        steps_taken: record.steps_taken(),
        terminated_early: record.terminated_early(),
        f_gap_avg: report.measured,
        psi_at_xstar: report.psi_at_xstar,
        bound_gm: report.bound_gm,
        bound_am: report.bound_am,
        bound_closed_form: report.closed_form_bound,
        max_sq_dist: record.max_sq_distance(p.minimizer())?,
        iterate_bound: (kind == LearnerKind::OgdConst)
            .then_some(dist * dist + grid.step_scale * grid.step_scale),
        grad_bound_exceeded: record.grad_bound_exceeded,
        bounds_hold: report.holds() && !record.grad_bound_exceeded,
    })
}

/// Runs every cell, in parallel, and returns rows in grid order
/// (`nu`, then learner, then `T`, then seed).
pub fn run_sweep(grid: &SweepGrid) -> Result<Vec<SweepRow>> {
    grid.validate()?;
    grid.cells()
        .into_par_iter()
        .map(|(nu, kind, horizon, seed)| run_cell(grid, nu, kind, horizon, seed))
        .collect()
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row).map_err(|e| Error::Config(format!("writing sweep: {e}")))?;
    }
    w.flush().map_err(|e| Error::Config(format!("writing sweep: {e}")))?;
    Ok(())
}

/// Rate fit of one `(nu, learner, seed)` series across horizons.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepFit {
    pub nu: f64,
    pub learner: LearnerKind,
    pub seed: u64,
    pub fit: std::result::Result<RateFit, String>,
}

pub fn fit_sweep_rates(rows: &[SweepRow]) -> Vec<SweepFit> {
    let mut keys: Vec<(f64, LearnerKind, u64)> = Vec::new();
    for r in rows {
        let key = (r.nu, r.learner, r.seed);
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    keys.into_iter()
        .map(|(nu, learner, seed)| {
            let points: Vec<(usize, f64)> = rows
                .iter()
                .filter(|r| r.nu == nu && r.learner == learner && r.seed == seed)
                .map(|r| (r.horizon, r.f_gap_avg))
                .collect();
            SweepFit {
                nu,
                learner,
                seed,
                fit: fit_rate(&points, nu).map_err(|e| e.to_string()),
            }
        })
        .collect()
}

/// Uniform direction on the unit sphere via normalized Gaussian draws.
fn unit_direction<R: Rng>(rng: &mut R, dim: usize) -> Vector {
    loop {
        let g: Vec<f64> = (0..dim).map(|_| gaussian(rng)).collect();
        let n = g.iter().map(|c| c * c).sum::<f64>().sqrt();
        if n > 1e-12 {
            return Vector::from_raw(g.into_iter().map(|c| c / n).collect());
        }
    }
}

fn gaussian<R: Rng>(rng: &mut R) -> f64 {
    // Box–Muller
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}
