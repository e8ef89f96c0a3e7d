//! Dense real vectors and the streaming weighted mean used to average iterates.
//!
//! Every [`Vector`] holds finite coordinates only. Binary operations check
//! dimensions and return [`Error::DimensionMismatch`] instead of panicking.

use std::ops::Index;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A dense coordinate vector with finite entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::contract("vectors need at least one coordinate"));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("vector coordinates"));
        }
        Ok(Self(coords))
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "zero-dimensional vector");
        Self(vec![0.0; dim])
    }

    /// Builds a vector without the finiteness check. Callers must guarantee
    /// the coordinates are finite and nonempty.
    pub(crate) fn from_raw(coords: Vec<f64>) -> Self {
        debug_assert!(!coords.is_empty());
        Self(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0.0)
    }

    pub(crate) fn check_dim(&self, other: &Vector) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }

    /// `self - other`.
    pub fn sub(&self, other: &Vector) -> Result<Vector> {
        axpy(-1.0, other, self)
    }

    pub fn scale(&self, a: f64) -> Vector {
        Vector(self.0.iter().map(|c| a * c).collect())
    }

    /// Euclidean distance to `other`.
    pub fn distance(&self, other: &Vector) -> Result<f64> {
        Ok(l2_norm(&self.sub(other)?))
    }
}

impl Index<usize> for Vector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl TryFrom<Vec<f64>> for Vector {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Vector::new(v)
    }
}

impl From<Vector> for Vec<f64> {
    fn from(v: Vector) -> Self {
        v.0
    }
}

pub fn dot(u: &Vector, v: &Vector) -> Result<f64> {
    u.check_dim(v)?;
    Ok(u.0.iter().zip(&v.0).map(|(a, b)| a * b).sum())
}

pub fn l2_norm(v: &Vector) -> f64 {
    v.0.iter().map(|c| c * c).sum::<f64>().sqrt()
}

/// Returns `y + a * x`.
pub fn axpy(a: f64, x: &Vector, y: &Vector) -> Result<Vector> {
    x.check_dim(y)?;
    let out: Vec<f64> = x.0.iter().zip(&y.0).map(|(xi, yi)| yi + a * xi).collect();
    if out.iter().any(|c| !c.is_finite()) {
        return Err(Error::NonFinite("axpy result"));
    }
    Ok(Vector(out))
}

/// Streaming accumulator for `Σ wᵢ xᵢ / Σ wᵢ`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedMean {
    weight_sum: f64,
    weighted_point_sum: Vec<f64>,
}

impl WeightedMean {
    pub fn new(dim: usize) -> Self {
        Self {
            weight_sum: 0.0,
            weighted_point_sum: vec![0.0; dim],
        }
    }

    pub fn weight_sum(&self) -> f64 {
        self.weight_sum
    }

    pub fn push(&mut self, x: &Vector, w: f64) -> Result<()> {
        if !(w.is_finite() && w > 0.0) {
            return Err(Error::contract(format!(
                "weights must be positive and finite, got {w}"
            )));
        }
        if x.dim() != self.weighted_point_sum.len() {
            return Err(Error::DimensionMismatch {
                expected: self.weighted_point_sum.len(),
                found: x.dim(),
            });
        }
        self.weight_sum += w;
        for (acc, xi) in self.weighted_point_sum.iter_mut().zip(x.iter()) {
            *acc += w * xi;
        }
        Ok(())
    }

    pub fn finalize(&self) -> Result<Vector> {
        if self.weight_sum <= 0.0 {
            return Err(Error::contract("weighted mean of an empty sequence"));
        }
        Vector::new(
            self.weighted_point_sum
                .iter()
                .map(|s| s / self.weight_sum)
                .collect(),
        )
    }
}
