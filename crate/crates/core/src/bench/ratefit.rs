use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Least-squares fit of `ln(gap) = slope · ln(T) + intercept`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// `−(1 + nu)/2`, the exponent of the worst-case rate.
    pub predicted_slope: f64,
    pub points_used: usize,
    /// Horizons left out because their gap was zero.
    #[serde(default)]
    pub excluded_horizons: Vec<usize>,
}

/// Fits the log–log rate over `(T, gap)` pairs. Points with a zero gap
/// (usually an early stop at the minimizer) are excluded and listed.
pub fn fit_rate(points: &[(usize, f64)], nu: f64) -> Result<RateFit> {
    let mut excluded = Vec::new();
    let mut xs = Vec::with_capacity(points.len());
    let mut ys = Vec::with_capacity(points.len());
    for &(t, gap) in points {
        if gap > 0.0 && gap.is_finite() && t > 0 {
            xs.push((t as f64).ln());
            ys.push(gap.ln());
        } else {
            excluded.push(t);
        }
    }
    if xs.len() < 3 {
        return Err(Error::Precondition(format!(
            "insufficient data: {} usable points, need at least 3",
            xs.len()
        )));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Precondition("insufficient data: all horizons are equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - (intercept + slope * x)).powi(2))
        .sum();
    let r_squared = if syy == 0.0 {
        if ss_res == 0.0 { 1.0 } else { 0.0 }
    } else {
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    };
    Ok(RateFit {
        slope,
        intercept,
        r_squared,
        predicted_slope: -(1.0 + nu) / 2.0,
        points_used: xs.len(),
        excluded_horizons: excluded,
    })
}
