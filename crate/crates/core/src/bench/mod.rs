//! Experiment harness: single runs with artifacts, parameter sweeps, rate
//! fitting, and the property-check suites.

mod check;
mod config;
mod output;
mod ratefit;
mod sweep;

use std::fs;
use std::path::{Path, PathBuf};

pub use check::{run_checks, CheckOptions, CheckReport, Suite, SuiteReport};
pub use config::{ExperimentConfig, RunConfig};
pub use output::{trajectory_rows, write_trajectory_csv, Summary, TrajectoryRow};
pub use ratefit::{fit_rate, RateFit};
pub use sweep::{
    fit_sweep_rates, run_sweep, sweep_problem, sweep_start, write_sweep_csv, SweepFit, SweepGrid,
    SweepRow,
};

use crate::error::{Error, Result};
use crate::problems::Problem;
use crate::reduction::{bound_report, run};

/// Process exit status used by the binary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Pass = 0,
    Failure = 1,
    Usage = 2,
}

/// A bound that failed for one `(learner, problem, T)` cell.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub learner: String,
    pub problem: String,
    pub horizon: usize,
    pub detail: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "learner={} problem={} T={}: {}",
            self.learner, self.problem, self.horizon, self.detail
        )
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub summaries: Vec<Summary>,
    pub violations: Vec<Violation>,
    pub written: Vec<PathBuf>,
}

impl RunOutcome {
    pub fn status(&self) -> ExitStatus {
        if self.violations.is_empty() {
            ExitStatus::Pass
        } else {
            ExitStatus::Failure
        }
    }
}

/// Runs every horizon of `cfg`, writing `trajectory_T{T}.csv` and
/// `summary_T{T}.json` into `out_dir`. When at least three horizons end with
/// a positive gap, the rate fit is attached to the last summary.
pub fn cmd_run(cfg: &ExperimentConfig, out_dir: &Path) -> Result<RunOutcome> {
    cfg.validate()?;
    let problem = Problem::from_config(&cfg.problem).map_err(|e| Error::Config(e.to_string()))?;
    fs::create_dir_all(out_dir).map_err(|e| Error::Config(format!("{}: {e}", out_dir.display())))?;

    let mut summaries = Vec::with_capacity(cfg.horizons.len());
    let mut violations = Vec::new();
    let mut written = Vec::new();
    for &horizon in &cfg.horizons {
        let learner = cfg.learner.clone().with_horizon(horizon);
        let record = run(&learner, &problem, horizon, cfg.eps_zero)?;
        let report = bound_report(&record, &problem, &learner)?;
        for detail in report.violations() {
            violations.push(Violation {
                learner: learner.kind.to_string(),
                problem: problem.family().to_string(),
                horizon,
                detail,
            });
        }

        let path = out_dir.join(format!("trajectory_T{horizon}.csv"));
        let file = fs::File::create(&path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        write_trajectory_csv(&record, &report, file)?;
        written.push(path);

        let run_cfg = RunConfig {
            problem: cfg.problem.clone(),
            learner,
            horizon,
            eps_zero: cfg.eps_zero,
        };
        summaries.push(Summary::new(run_cfg, &record, &report));
    }

    let points: Vec<(usize, f64)> = summaries.iter().map(|s| (s.config.horizon, s.f_gap_avg)).collect();
    if let Ok(fit) = fit_rate(&points, problem.spec().nu) {
        if let Some(last) = summaries.last_mut() {
            last.rate_fit = Some(fit);
        }
    }
    for s in &summaries {
        let path = out_dir.join(format!("summary_T{}.json", s.config.horizon));
        let body = serde_json::to_string_pretty(s).expect("summaries serialize");
        fs::write(&path, body + "\n").map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        written.push(path);
    }
    Ok(RunOutcome {
        summaries,
        violations,
        written,
    })
}

/// Reads summary files, each holding one record or an array of records.
pub fn read_summaries(paths: &[PathBuf]) -> Result<Vec<Summary>> {
    let mut out = Vec::new();
    for path in paths {
        let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let value: serde_json::Value =
            serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let parse = |v: serde_json::Value| {
            serde_json::from_value::<Summary>(v).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
        };
        match value {
            serde_json::Value::Array(items) => {
                for item in items {
                    out.push(parse(item)?);
                }
            }
            other => out.push(parse(other)?),
        }
    }
    Ok(out)
}

/// Fits `log gap` against `log T` over the given summaries. All of them must
/// come from problems with the same Hölder exponent.
pub fn cmd_ratefit(summaries: &[Summary]) -> Result<RateFit> {
    let mut nu = None;
    let mut points = Vec::with_capacity(summaries.len());
    for s in summaries {
        let this = Problem::from_config(&s.config.problem)?.spec().nu;
        match nu {
            None => nu = Some(this),
            Some(prev) if prev != this => {
                return Err(Error::Config(format!(
                    "summaries mix Hölder exponents {prev} and {this}"
                )))
            }
            _ => {}
        }
        points.push((s.config.horizon, s.f_gap_avg));
    }
    fit_rate(&points, nu.unwrap_or(0.0))
}
