//! Convex test functions with analytic gradients, known minimizers, and
//! declared Hölder parameters, together with executable checks of the
//! smoothness inequalities every family has to satisfy.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vector::{axpy, dot, l2_norm, Vector};

/// Half-width of the box, centered at the minimizer, from which checkers
/// draw random points.
pub const DEFAULT_SAMPLE_RADIUS: f64 = 10.0;

/// Relative slack accepted by the descent-inequality and gradient-bound checks.
pub const CHECK_SLACK: f64 = 1e-9;

/// Hölder exponent `nu`, constant `l_nu`, and the constant `holder_alpha`
/// that appears in the gradient-vs-gap assumption of the reduction bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HolderSpec {
    pub nu: f64,
    pub l_nu: f64,
    pub holder_alpha: f64,
}

impl HolderSpec {
    /// `holder_alpha` is set to `1 + 1/nu`, or to 1 when `nu = 0`.
    pub fn new(nu: f64, l_nu: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&nu) {
            return Err(Error::contract(format!("nu must lie in [0, 1], got {nu}")));
        }
        if !(l_nu.is_finite() && l_nu > 0.0) {
            return Err(Error::contract(format!("l_nu must be positive, got {l_nu}")));
        }
        let holder_alpha = if nu > 0.0 { 1.0 + 1.0 / nu } else { 1.0 };
        Ok(Self {
            nu,
            l_nu,
            holder_alpha,
        })
    }

    /// `(1 + 1/nu)^nu`, taken as its limit 1 at `nu = 0`.
    pub fn growth_factor(&self) -> f64 {
        if self.nu == 0.0 {
            1.0
        } else {
            (1.0 + 1.0 / self.nu).powf(self.nu)
        }
    }

    /// `holder_alpha^nu`, which is 1 at `nu = 0`.
    pub fn alpha_pow_nu(&self) -> f64 {
        if self.nu == 0.0 {
            1.0
        } else {
            self.holder_alpha.powf(self.nu)
        }
    }
}

/// The shipped function families. `r` below is `x - x*`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "parameters", rename_all = "snake_case")]
pub enum Family {
    /// `½‖r‖²`.
    Quadratic,
    /// `‖r‖^(1+nu) / (1+nu)`.
    PowerNorm { nu: f64 },
    /// `scale · ‖r‖`.
    L2Norm { scale: f64 },
    /// Quadratic `‖r‖²/(2δ)` inside the ball of radius δ, linear `‖r‖ − δ/2` outside.
    Huber { delta: f64 },
    /// `ln(mean_i cosh rᵢ)`, a smooth symmetric log-sum-exp.
    LogSumExp,
}

impl Family {
    fn validate(&self) -> Result<()> {
        match *self {
            Family::PowerNorm { nu } if !(0.0..=1.0).contains(&nu) => Err(Error::contract(
                format!("power_norm exponent nu must lie in [0, 1], got {nu}"),
            )),
            Family::L2Norm { scale } if !(scale.is_finite() && scale > 0.0) => {
                Err(Error::contract(format!("l2_norm scale must be positive, got {scale}")))
            }
            Family::Huber { delta } if !(delta.is_finite() && delta > 0.0) => {
                Err(Error::contract(format!("huber delta must be positive, got {delta}")))
            }
            _ => Ok(()),
        }
    }

    /// Declared Hölder exponent and constant.
    pub fn holder_spec(&self) -> HolderSpec {
        let (nu, l) = match *self {
            Family::Quadratic => (1.0, 1.0),
            Family::PowerNorm { nu } => (nu, 2f64.powf(1.0 - nu)),
            // Gradients are unit vectors times `scale`, so they differ by at most 2·scale.
            Family::L2Norm { scale } => (0.0, 2.0 * scale),
            Family::Huber { delta } => (1.0, 1.0 / delta),
            Family::LogSumExp => (1.0, 1.0),
        };
        HolderSpec::new(nu, l).expect("family constants are valid")
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Quadratic => write!(f, "quadratic"),
            Family::PowerNorm { nu } => write!(f, "power_norm(nu={nu})"),
            Family::L2Norm { scale } => write!(f, "l2_norm(scale={scale})"),
            Family::Huber { delta } => write!(f, "huber(delta={delta})"),
            Family::LogSumExp => write!(f, "log_sum_exp"),
        }
    }
}

/// Structured problem record as it appears in config files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemConfig {
    #[serde(flatten)]
    pub family: Family,
    pub dimension: usize,
    /// Drawn uniformly from `[-1, 1]^d` using `seed` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub minimizer: Option<Vec<f64>>,
    #[serde(default)]
    pub optimum: f64,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    family: Family,
    minimizer: Vector,
    optimum: f64,
    spec: HolderSpec,
}

impl Problem {
    pub fn new(family: Family, minimizer: Vector, optimum: f64) -> Result<Self> {
        family.validate()?;
        if !optimum.is_finite() {
            return Err(Error::NonFinite("optimum"));
        }
        Ok(Self {
            family,
            spec: family.holder_spec(),
            minimizer,
            optimum,
        })
    }

    pub fn from_config(cfg: &ProblemConfig) -> Result<Self> {
        if cfg.dimension == 0 {
            return Err(Error::Config("dimension must be positive".into()));
        }
        let minimizer = match &cfg.minimizer {
            Some(m) if m.len() != cfg.dimension => {
                return Err(Error::Config(format!(
                    "minimizer has {} coordinates but dimension is {}",
                    m.len(),
                    cfg.dimension
                )))
            }
            Some(m) => Vector::new(m.clone())?,
            None => random_minimizer(cfg.dimension, cfg.seed),
        };
        Problem::new(cfg.family, minimizer, cfg.optimum)
    }

    pub fn quadratic(minimizer: Vector) -> Self {
        Self::new(Family::Quadratic, minimizer, 0.0).expect("valid family")
    }

    pub fn power_norm(nu: f64, minimizer: Vector) -> Result<Self> {
        Self::new(Family::PowerNorm { nu }, minimizer, 0.0)
    }

    pub fn l2_norm(minimizer: Vector) -> Self {
        Self::new(Family::L2Norm { scale: 1.0 }, minimizer, 0.0).expect("valid family")
    }

    pub fn huber(delta: f64, minimizer: Vector) -> Result<Self> {
        Self::new(Family::Huber { delta }, minimizer, 0.0)
    }

    pub fn log_sum_exp(minimizer: Vector) -> Self {
        Self::new(Family::LogSumExp, minimizer, 0.0).expect("valid family")
    }

    /// One problem of every family, with minimizers drawn from `seed`.
    pub fn suite(dim: usize, seed: u64) -> Vec<Problem> {
        let families = [
            Family::Quadratic,
            Family::PowerNorm { nu: 0.25 },
            Family::PowerNorm { nu: 0.5 },
            Family::PowerNorm { nu: 0.75 },
            Family::L2Norm { scale: 1.0 },
            Family::Huber { delta: 1.0 },
            Family::LogSumExp,
        ];
        families
            .iter()
            .enumerate()
            .map(|(i, fam)| {
                let xstar = random_minimizer(dim, seed.wrapping_add(i as u64));
                Problem::new(*fam, xstar, 0.0).expect("suite families are valid")
            })
            .collect()
    }

    /// Replaces the declared Hölder constant. Used for negative controls.
    pub fn with_declared_l_nu(mut self, l_nu: f64) -> Result<Self> {
        self.spec = HolderSpec::new(self.spec.nu, l_nu)?;
        Ok(self)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn dim(&self) -> usize {
        self.minimizer.dim()
    }

    pub fn minimizer(&self) -> &Vector {
        &self.minimizer
    }

    pub fn optimum(&self) -> f64 {
        self.optimum
    }

    pub fn spec(&self) -> &HolderSpec {
        &self.spec
    }

    /// Constant multiplying `(ψ/T)^(1+nu)` in the per-learner rates:
    /// `l_nu (1 + 1/nu)^nu` for `nu > 0`. At `nu = 0` the local constant
    /// reduces to the gradient norm, so the uniform gradient bound is used.
    pub fn rate_constant(&self) -> f64 {
        match self.family {
            Family::L2Norm { scale } => scale,
            Family::PowerNorm { nu: 0.0 } => 1.0,
            _ => self.spec.l_nu * self.spec.growth_factor(),
        }
    }

    fn offset(&self, x: &Vector) -> Result<Vec<f64>> {
        self.minimizer.check_dim(x)?;
        Ok(x.iter().zip(self.minimizer.iter()).map(|(a, b)| a - b).collect())
    }

    pub fn eval(&self, x: &Vector) -> Result<f64> {
        let r = self.offset(x)?;
        let sq: f64 = r.iter().map(|c| c * c).sum();
        let gap = match self.family {
            Family::Quadratic => 0.5 * sq,
            Family::PowerNorm { nu } => sq.powf((1.0 + nu) / 2.0) / (1.0 + nu),
            Family::L2Norm { scale } => scale * sq.sqrt(),
            Family::Huber { delta } => {
                let n = sq.sqrt();
                if n <= delta {
                    sq / (2.0 * delta)
                } else {
                    n - delta / 2.0
                }
            }
            Family::LogSumExp => log_mean_cosh(&r),
        };
        let value = self.optimum + gap;
        if !value.is_finite() {
            return Err(Error::NonFinite("function value"));
        }
        Ok(value)
    }

    /// Analytic gradient; the zero vector at nonsmooth minimizers.
    pub fn grad(&self, x: &Vector) -> Result<Vector> {
        let r = self.offset(x)?;
        let sq: f64 = r.iter().map(|c| c * c).sum();
        let g: Vec<f64> = match self.family {
            Family::Quadratic => r,
            Family::PowerNorm { nu } => {
                if sq == 0.0 {
                    vec![0.0; r.len()]
                } else {
                    let s = sq.powf((nu - 1.0) / 2.0);
                    r.iter().map(|c| s * c).collect()
                }
            }
            Family::L2Norm { scale } => {
                if sq == 0.0 {
                    vec![0.0; r.len()]
                } else {
                    let s = scale / sq.sqrt();
                    r.iter().map(|c| s * c).collect()
                }
            }
            Family::Huber { delta } => {
                let s = 1.0 / sq.sqrt().max(delta);
                r.iter().map(|c| s * c).collect()
            }
            Family::LogSumExp => {
                let m = r.iter().fold(0.0f64, |acc, c| acc.max(c.abs()));
                let denom: f64 = r.iter().map(|c| (c - m).exp() + (-c - m).exp()).sum();
                r.iter()
                    .map(|c| ((c - m).exp() - (-c - m).exp()) / denom)
                    .collect()
            }
        };
        if g.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("gradient"));
        }
        Ok(Vector::from_raw(g))
    }

    /// Distance from `x` to the set where the gradient (or, for Huber, the
    /// curvature) is not smooth. Infinite for everywhere-smooth families.
    pub fn distance_to_nonsmooth(&self, x: &Vector) -> Result<f64> {
        let n = x.distance(&self.minimizer)?;
        Ok(match self.family {
            Family::PowerNorm { nu } if nu < 1.0 => n,
            Family::L2Norm { .. } => n,
            Family::Huber { delta } => (n - delta).abs(),
            _ => f64::INFINITY,
        })
    }
}

/// `ln(mean_i cosh rᵢ)` evaluated without cancellation near zero or overflow
/// for large arguments.
fn log_mean_cosh(r: &[f64]) -> f64 {
    let d = r.len() as f64;
    let m = r.iter().fold(0.0f64, |acc, c| acc.max(c.abs()));
    if m < 20.0 {
        // cosh(c) - 1 = 2 sinh²(c/2)
        let excess: f64 = r.iter().map(|c| 2.0 * (c / 2.0).sinh().powi(2)).sum::<f64>() / d;
        excess.ln_1p()
    } else {
        let s: f64 = r.iter().map(|c| (c - m).exp() + (-c - m).exp()).sum::<f64>();
        (m + (s / (2.0 * d)).ln()).max(0.0)
    }
}

fn random_minimizer(dim: usize, seed: u64) -> Vector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Vector::from_raw((0..dim).map(|_| rng.gen_range(-1.0..=1.0)).collect())
}

/// Uniform point in the box of half-width `radius` around the minimizer.
pub fn sample_point<R: Rng>(p: &Problem, rng: &mut R, radius: f64) -> Vector {
    Vector::from_raw(
        p.minimizer()
            .iter()
            .map(|c| c + rng.gen_range(-radius..=radius))
            .collect(),
    )
}

/// Central differences `(f(x + h eᵢ) - f(x - h eᵢ)) / 2h` per coordinate.
pub fn finite_diff_grad(p: &Problem, x: &Vector, h: f64) -> Result<Vector> {
    if !(h > 0.0) {
        return Err(Error::Precondition(format!("step h must be positive, got {h}")));
    }
    let mut out = Vec::with_capacity(x.dim());
    let mut probe = x.clone().into_inner();
    for i in 0..x.dim() {
        let orig = probe[i];
        probe[i] = orig + h;
        let fp = p.eval(&Vector::new(probe.clone())?)?;
        probe[i] = orig - h;
        let fm = p.eval(&Vector::new(probe.clone())?)?;
        probe[i] = orig;
        out.push((fp - fm) / (2.0 * h));
    }
    Vector::new(out)
}

/// Result of a single inequality check: `residual` is right side minus
/// left side, so negative values are violations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckOutcome {
    pub passed: bool,
    pub residual: f64,
}

/// Checks `f(y) ≤ f(x) + ⟨∇f(x), y − x⟩ + l_nu/(1+nu) ‖x − y‖^(1+nu)` against
/// the problem's declared constants.
pub fn check_descent_inequality(p: &Problem, x: &Vector, y: &Vector) -> Result<CheckOutcome> {
    let spec = p.spec();
    let fx = p.eval(x)?;
    let fy = p.eval(y)?;
    let g = p.grad(x)?;
    let step = y.sub(x)?;
    let rhs = fx + dot(&g, &step)? + spec.l_nu / (1.0 + spec.nu) * l2_norm(&step).powf(1.0 + spec.nu);
    let residual = rhs - fy;
    Ok(CheckOutcome {
        passed: residual >= -CHECK_SLACK * (1.0 + fy.abs()),
        residual,
    })
}

/// Checks `‖∇f(x)‖^(1+1/nu) ≤ (1 + 1/nu) l_nu^(1/nu) (f(x) − f*)`; needs `nu > 0`.
pub fn check_grad_bound(p: &Problem, x: &Vector) -> Result<CheckOutcome> {
    let spec = p.spec();
    if spec.nu <= 0.0 {
        return Err(Error::Precondition(
            "the gradient-norm bound needs nu > 0".into(),
        ));
    }
    let gap = p.eval(x)? - p.optimum();
    let lhs = l2_norm(&p.grad(x)?).powf(1.0 + 1.0 / spec.nu);
    let rhs = (1.0 + 1.0 / spec.nu) * spec.l_nu.powf(1.0 / spec.nu) * gap;
    let residual = rhs - lhs;
    Ok(CheckOutcome {
        passed: lhs <= rhs + CHECK_SLACK * rhs.abs(),
        residual,
    })
}

/// Largest `‖∇f(x) − ∇f(y)‖ / ‖x − y‖^nu` over `n` random pairs drawn from
/// the default sampling box. Always a lower estimate of the true constant.
pub fn sample_holder_constant(p: &Problem, n: usize, seed: u64) -> Result<f64> {
    sample_holder_constant_in(p, n, seed, DEFAULT_SAMPLE_RADIUS)
}

pub fn sample_holder_constant_in(p: &Problem, n: usize, seed: u64, radius: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Precondition("need at least one sample pair".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nu = p.spec().nu;
    let mut best = 0.0f64;
    for _ in 0..n {
        let x = sample_point(p, &mut rng, radius);
        let mut y = sample_point(p, &mut rng, radius);
        while y == x {
            y = sample_point(p, &mut rng, radius);
        }
        let dg = l2_norm(&axpy(-1.0, &p.grad(&y)?, &p.grad(&x)?)?);
        let dx = x.distance(&y)?;
        best = best.max(dg / dx.powf(nu));
    }
    Ok(best)
}

/// Smallest `L(x)` with `‖∇f(x)‖ ≤ α^(nu/(1+nu)) L(x)^(1/(1+nu)) (f(x) − f*)^(nu/(1+nu))`,
/// i.e. `‖∇f(x)‖^(1+nu) / (α^nu (f(x) − f*)^nu)` with `α = holder_alpha`.
/// At `nu = 0` this is the gradient norm itself.
pub fn local_holder_constant(p: &Problem, x: &Vector) -> Result<f64> {
    let spec = p.spec();
    let gap = p.eval(x)? - p.optimum();
    if gap <= 0.0 {
        return Err(Error::DegeneratePoint);
    }
    let g = l2_norm(&p.grad(x)?);
    Ok(g.powf(1.0 + spec.nu) / (spec.alpha_pow_nu() * gap.powf(spec.nu)))
}
