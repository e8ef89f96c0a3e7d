use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learners::LearnerConfig;
use crate::problems::ProblemConfig;
use crate::reduction::DEFAULT_EPS_ZERO;

fn default_eps_zero() -> f64 {
    DEFAULT_EPS_ZERO
}

/// Contents of a `run --config` file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub problem: ProblemConfig,
    /// For `ogd_const` the horizon is replaced by each entry of `horizons`.
    pub learner: LearnerConfig,
    pub horizons: Vec<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_eps_zero")]
    pub eps_zero: f64,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.horizons.is_empty() {
            return Err(Error::Config("at least one horizon is required".into()));
        }
        if self.horizons[0] == 0 {
            return Err(Error::Config("horizons must be positive".into()));
        }
        if self.horizons.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("horizons must be strictly increasing".into()));
        }
        if !(self.eps_zero > 0.0) {
            return Err(Error::Config(format!("eps_zero must be positive, got {}", self.eps_zero)));
        }
        if self.learner.start.dim() != self.problem.dimension {
            return Err(Error::Config(format!(
                "learner start has {} coordinates but the problem has dimension {}",
                self.learner.start.dim(),
                self.problem.dimension
            )));
        }
        self.learner
            .clone()
            .with_horizon(self.horizons[0])
            .validate()
            .map_err(|e| Error::Config(e.to_string()))
    }
}

/// The configuration of one executed run, stored in its summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub problem: ProblemConfig,
    pub learner: LearnerConfig,
    pub horizon: usize,
    pub eps_zero: f64,
}
