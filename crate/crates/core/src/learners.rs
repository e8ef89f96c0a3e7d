//! Online linear learners.
//!
//! Each learner plays a point, receives a linear loss `⟨q, ·⟩`, and carries a
//! closed-form regret bound `ψ_T(D)` against any comparator at distance `D`
//! from its start. OGD, dual averaging, and KT expect unit-norm losses;
//! AdaGrad-norm dual averaging takes raw gradients bounded by `G`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vector::{dot, l2_norm, Vector};

/// Accepted deviation of `‖q‖` from 1 for unit-loss learners.
pub const UNIT_NORM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LearnerKind {
    /// Online gradient descent with constant step `α/√T`.
    OgdConst,
    /// Dual averaging with step `α/√t`.
    DaSqrt,
    /// Krichevsky–Trofimov coin betting.
    Kt,
    /// Dual averaging with AdaGrad-norm steps on raw gradients.
    AdaGradDa,
}

impl LearnerKind {
    pub const ALL: [LearnerKind; 4] = [
        LearnerKind::OgdConst,
        LearnerKind::DaSqrt,
        LearnerKind::Kt,
        LearnerKind::AdaGradDa,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LearnerKind::OgdConst => "ogd_const",
            LearnerKind::DaSqrt => "da_sqrt",
            LearnerKind::Kt => "kt",
            LearnerKind::AdaGradDa => "ada_grad_da",
        }
    }

    /// Whether the learner expects losses with `‖q‖ = 1`.
    pub fn unit_losses(self) -> bool {
        !matches!(self, LearnerKind::AdaGradDa)
    }
}

impl fmt::Display for LearnerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl std::str::FromStr for LearnerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LearnerKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown learner kind `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnerConfig {
    pub kind: LearnerKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step_scale: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wealth_init: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grad_bound_init: Option<f64>,
    pub start: Vector,
}

impl LearnerConfig {
    pub fn ogd_const(step_scale: f64, horizon: usize, start: Vector) -> Self {
        Self {
            kind: LearnerKind::OgdConst,
            step_scale: Some(step_scale),
            horizon: Some(horizon),
            wealth_init: None,
            grad_bound_init: None,
            start,
        }
    }

    pub fn da_sqrt(step_scale: f64, start: Vector) -> Self {
        Self {
            kind: LearnerKind::DaSqrt,
            step_scale: Some(step_scale),
            horizon: None,
            wealth_init: None,
            grad_bound_init: None,
            start,
        }
    }

    pub fn kt(wealth_init: f64, start: Vector) -> Self {
        Self {
            kind: LearnerKind::Kt,
            step_scale: None,
            horizon: None,
            wealth_init: Some(wealth_init),
            grad_bound_init: None,
            start,
        }
    }

    pub fn adagrad_da(step_scale: f64, grad_bound_init: f64, start: Vector) -> Self {
        Self {
            kind: LearnerKind::AdaGradDa,
            step_scale: Some(step_scale),
            horizon: None,
            wealth_init: None,
            grad_bound_init: Some(grad_bound_init),
            start,
        }
    }

    /// Same config with the OGD horizon replaced; other kinds are unchanged.
    pub fn with_horizon(mut self, horizon: usize) -> Self {
        if self.kind == LearnerKind::OgdConst {
            self.horizon = Some(horizon);
        }
        self
    }

    pub fn with_start(mut self, start: Vector) -> Self {
        self.start = start;
        self
    }

    fn positive(name: &str, v: Option<f64>, kind: LearnerKind) -> Result<f64> {
        match v {
            Some(x) if x.is_finite() && x > 0.0 => Ok(x),
            Some(x) => Err(Error::contract(format!("{kind}: {name} must be positive, got {x}"))),
            None => Err(Error::contract(format!("{kind}: {name} is required"))),
        }
    }

    pub fn step_scale(&self) -> Result<f64> {
        Self::positive("step_scale", self.step_scale, self.kind)
    }

    pub fn wealth_init(&self) -> Result<f64> {
        Self::positive("wealth_init", self.wealth_init, self.kind)
    }

    pub fn grad_bound_init(&self) -> Result<f64> {
        Self::positive("grad_bound_init", self.grad_bound_init, self.kind)
    }

    pub fn horizon(&self) -> Result<usize> {
        match self.horizon {
            Some(h) if h >= 1 => Ok(h),
            _ => Err(Error::contract(format!("{}: horizon must be at least 1", self.kind))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            LearnerKind::OgdConst => {
                self.step_scale()?;
                self.horizon()?;
            }
            LearnerKind::DaSqrt => {
                self.step_scale()?;
            }
            LearnerKind::Kt => {
                self.wealth_init()?;
            }
            LearnerKind::AdaGradDa => {
                self.step_scale()?;
                self.grad_bound_init()?;
            }
        }
        Ok(())
    }

    /// Closed-form regret bound `ψ_T(D)` against comparators at distance
    /// `dist` from the start.
    ///
    /// OGD's bound holds only at its configured horizon. AdaGrad-norm's bound
    /// depends on the realized `Σ‖g_t‖²`, passed as `realized_sq_norm_sum`.
    pub fn regret_bound(
        &self,
        dist: f64,
        horizon: usize,
        realized_sq_norm_sum: Option<f64>,
    ) -> Result<f64> {
        self.validate()?;
        if !(dist >= 0.0 && dist.is_finite()) {
            return Err(Error::contract(format!("comparator distance must be nonnegative, got {dist}")));
        }
        if horizon == 0 {
            return Err(Error::contract("horizon must be at least 1"));
        }
        let t = horizon as f64;
        let d2 = dist * dist;
        Ok(match self.kind {
            LearnerKind::OgdConst => {
                let configured = self.horizon()?;
                if configured != horizon {
                    return Err(Error::contract(format!(
                        "ogd_const bound is valid only at its horizon {configured}, queried at {horizon}"
                    )));
                }
                let a = self.step_scale()?;
                t.sqrt() * d2 / (2.0 * a) + a * t.sqrt() / 2.0
            }
            LearnerKind::DaSqrt => {
                let a = self.step_scale()?;
                t.sqrt() * (d2 / (2.0 * a) + a)
            }
            LearnerKind::Kt => {
                let d0 = self.wealth_init()?;
                dist * (t * (24.0 * t * t * d2 / (d0 * d0) + 1.0).ln()).sqrt() + d0
            }
            LearnerKind::AdaGradDa => {
                let a = self.step_scale()?;
                let g = self.grad_bound_init()?;
                let s = realized_sq_norm_sum.ok_or_else(|| {
                    Error::contract("ada_grad_da bound needs the realized sum of squared gradient norms")
                })?;
                (d2 / (2.0 * a) + a) * (g + s.max(0.0).sqrt())
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Accumulators {
    OgdConst { point: Vec<f64> },
    DaSqrt { loss_sum: Vec<f64> },
    /// `centered_gain` is `Σ⟨qᵢ, wᵢ⟩` over centered iterates `wᵢ = xᵢ − x₁`.
    Kt { loss_sum: Vec<f64>, centered_gain: f64 },
    AdaGradDa { grad_sum: Vec<f64>, sq_norm_sum: f64 },
}

/// Running state of one online learner.
#[derive(Debug, Clone, PartialEq)]
pub struct Learner {
    config: LearnerConfig,
    steps: usize,
    acc: Accumulators,
}

impl Learner {
    pub fn new(config: LearnerConfig) -> Result<Self> {
        config.validate()?;
        let d = config.start.dim();
        let acc = match config.kind {
            LearnerKind::OgdConst => Accumulators::OgdConst {
                point: config.start.as_slice().to_vec(),
            },
            LearnerKind::DaSqrt => Accumulators::DaSqrt { loss_sum: vec![0.0; d] },
            LearnerKind::Kt => Accumulators::Kt {
                loss_sum: vec![0.0; d],
                centered_gain: 0.0,
            },
            LearnerKind::AdaGradDa => Accumulators::AdaGradDa {
                grad_sum: vec![0.0; d],
                sq_norm_sum: 0.0,
            },
        };
        Ok(Self {
            config,
            steps: 0,
            acc,
        })
    }

    pub fn config(&self) -> &LearnerConfig {
        &self.config
    }

    pub fn kind(&self) -> LearnerKind {
        self.config.kind
    }

    /// Number of losses accepted so far.
    pub fn steps(&self) -> usize {
        self.steps
    }

    /// `Σ‖gᵢ‖²` for AdaGrad-norm, `None` for the other kinds.
    pub fn sq_norm_sum(&self) -> Option<f64> {
        match &self.acc {
            Accumulators::AdaGradDa { sq_norm_sum, .. } => Some(*sq_norm_sum),
            _ => None,
        }
    }

    /// Displacement `x_{t+1} − x₁` of the next point from the start. For the
    /// sum-based learners it is computed from the accumulators alone and does
    /// not depend on `x₁`.
    pub fn displacement(&self) -> Vector {
        let t = self.steps as f64;
        let v = match &self.acc {
            Accumulators::OgdConst { point } => point
                .iter()
                .zip(self.config.start.iter())
                .map(|(p, s)| p - s)
                .collect(),
            Accumulators::DaSqrt { loss_sum } => {
                if self.steps == 0 {
                    vec![0.0; loss_sum.len()]
                } else {
                    let eta = self.config.step_scale.unwrap_or_default() / t.sqrt();
                    loss_sum.iter().map(|q| -eta * q).collect()
                }
            }
            Accumulators::Kt {
                loss_sum,
                centered_gain,
            } => {
                let wealth = self.config.wealth_init.unwrap_or_default() - centered_gain;
                let bet = wealth / (t + 1.0);
                loss_sum.iter().map(|q| -q * bet).collect()
            }
            Accumulators::AdaGradDa {
                grad_sum,
                sq_norm_sum,
            } => {
                let g = self.config.grad_bound_init.unwrap_or_default();
                let eta = self.config.step_scale.unwrap_or_default() / (g * g + sq_norm_sum).sqrt();
                grad_sum.iter().map(|q| -eta * q).collect()
            }
        };
        Vector::from_raw(v)
    }

    /// The point `x_{t+1}` the learner plays next. Does not change state.
    pub fn next_point(&self) -> Vector {
        match &self.acc {
            Accumulators::OgdConst { point } => Vector::from_raw(point.clone()),
            _ => {
                let w = self.displacement();
                Vector::from_raw(
                    self.config
                        .start
                        .iter()
                        .zip(w.iter())
                        .map(|(s, wi)| s + wi)
                        .collect(),
                )
            }
        }
    }

    /// Feeds the loss vector `q` for the point last returned by [`next_point`](Self::next_point).
    pub fn observe(&mut self, q: &Vector) -> Result<()> {
        let norm = l2_norm(q);
        let ok = if self.kind().unit_losses() {
            (norm - 1.0).abs() <= UNIT_NORM_TOLERANCE
        } else {
            norm <= self.config.grad_bound_init.unwrap_or_default() + UNIT_NORM_TOLERANCE
        };
        if !ok {
            return Err(Error::LossNorm {
                kind: self.kind().name(),
                norm,
            });
        }
        self.accumulate(q)
    }

    /// Like [`observe`](Self::observe) without the loss-norm precondition.
    pub(crate) fn accumulate(&mut self, q: &Vector) -> Result<()> {
        self.config.start.check_dim(q)?;
        let kt_gain = match self.acc {
            Accumulators::Kt { .. } => dot(q, &self.displacement())?,
            _ => 0.0,
        };
        let horizon = self.config.horizon.unwrap_or(1) as f64;
        let step_scale = self.config.step_scale.unwrap_or_default();
        match &mut self.acc {
            Accumulators::OgdConst { point } => {
                let eta = step_scale / horizon.sqrt();
                for (p, qi) in point.iter_mut().zip(q.iter()) {
                    *p -= eta * qi;
                }
            }
            Accumulators::DaSqrt { loss_sum } => add_into(loss_sum, q),
            Accumulators::Kt {
                loss_sum,
                centered_gain,
            } => {
                *centered_gain += kt_gain;
                add_into(loss_sum, q);
            }
            Accumulators::AdaGradDa {
                grad_sum,
                sq_norm_sum,
            } => {
                *sq_norm_sum += q.iter().map(|c| c * c).sum::<f64>();
                add_into(grad_sum, q);
            }
        }
        self.steps += 1;
        Ok(())
    }
}

fn add_into(acc: &mut [f64], q: &Vector) {
    for (a, qi) in acc.iter_mut().zip(q.iter()) {
        *a += qi;
    }
}
