use std::io::Write;

use serde::{Deserialize, Serialize};

use super::config::RunConfig;
use super::ratefit::RateFit;
use crate::error::{Error, Result};
use crate::reduction::{BoundReport, RunRecord};

/// One loss-fed step of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub t: usize,
    pub f_gap: f64,
    pub grad_norm: f64,
    pub weight: f64,
    /// Empty when the local constant is undefined at this iterate.
    #[serde(rename = "local_L")]
    pub local_l: Option<f64>,
}

pub fn trajectory_rows(record: &RunRecord, report: &BoundReport) -> Vec<TrajectoryRow> {
    // local constants were collected only where the gap is positive
    let mut locals = report.local_constants.iter();
    record
        .suboptimalities
        .iter()
        .zip(&record.grad_norms)
        .zip(&record.weights)
        .enumerate()
        .map(|(i, ((&f_gap, &grad_norm), &weight))| TrajectoryRow {
            t: i + 1,
            f_gap,
            grad_norm,
            weight,
            local_l: if f_gap > 0.0 { locals.next().copied() } else { None },
        })
        .collect()
}

pub fn write_trajectory_csv<W: Write>(record: &RunRecord, report: &BoundReport, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    let csv_err = |e: csv::Error| Error::Config(format!("writing trajectory: {e}"));
    // header is written explicitly so that runs with no loss-fed steps still have one
    w.write_record(["t", "f_gap", "grad_norm", "weight", "local_L"]).map_err(csv_err)?;
    for row in trajectory_rows(record, report) {
        w.serialize(row).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Config(format!("writing trajectory: {e}")))?;
    Ok(())
}

/// Summary record written once per horizon by `run`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub config: RunConfig,
    pub steps_taken: usize,
    pub terminated_early: bool,
    pub f_gap_avg: f64,
    pub psi_at_xstar: f64,
    pub bound_gm: Option<f64>,
    pub bound_am: Option<f64>,
    pub bound_closed_form: f64,
    #[serde(default)]
    pub local_constants: Vec<f64>,
    #[serde(default)]
    pub violations: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rate_fit: Option<RateFit>,
}

impl Summary {
    pub fn new(config: RunConfig, record: &RunRecord, report: &BoundReport) -> Self {
        Self {
            config,
            steps_taken: record.steps_taken(),
            terminated_early: record.terminated_early(),
            f_gap_avg: report.measured,
            psi_at_xstar: report.psi_at_xstar,
            bound_gm: report.bound_gm,
            bound_am: report.bound_am,
            bound_closed_form: report.closed_form_bound,
            local_constants: report.local_constants.clone(),
            violations: report.violations(),
            rate_fit: None,
        }
    }
}
