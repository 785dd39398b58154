//! Dense real vectors with a finiteness invariant.

use std::fmt;
use std::ops::{Add, Index, Mul, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{OracleError, Result};

/// A dense, finite-dimensional real vector. Always non-empty with finite entries.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(OracleError::EmptyVector);
        }
        if let Some(index) = entries.iter().position(|v| !v.is_finite()) {
            return Err(OracleError::NonFinite { index });
        }
        Ok(Vector(entries))
    }

    /// Wraps entries already known to be finite and non-empty.
    pub(crate) fn from_vec_unchecked(entries: Vec<f64>) -> Self {
        debug_assert!(!entries.is_empty());
        Vector(entries)
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        Self::new(vec![0.0; dim])
    }

    /// Standard basis vector `e_index` scaled by `scale`.
    pub fn basis(dim: usize, index: usize, scale: f64) -> Result<Self> {
        if index >= dim {
            return Err(OracleError::InvalidParameter(format!(
                "basis index {index} out of range for dimension {dim}"
            )));
        }
        let mut entries = vec![0.0; dim];
        entries[index] = scale;
        Self::new(entries)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn norm_squared(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum()
    }

    pub fn distance(&self, other: &Vector) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    /// `self * factor`, rejecting results that overflow.
    pub fn scaled(&self, factor: f64) -> Result<Vector> {
        Vector::new(self.0.iter().map(|v| v * factor).collect())
    }

    pub fn map(&self, f: impl FnMut(&f64) -> f64) -> Result<Vector> {
        Vector::new(self.0.iter().map(f).collect())
    }

    /// Errors with [`OracleError::DimensionMismatch`] unless `self.dim() == dim`.
    pub fn expect_dim(&self, dim: usize) -> Result<()> {
        if self.dim() == dim {
            Ok(())
        } else {
            Err(OracleError::DimensionMismatch {
                expected: dim,
                found: self.dim(),
            })
        }
    }
}

impl<'de> Deserialize<'de> for Vector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let entries = Vec::<f64>::deserialize(deserializer)?;
        Vector::new(entries).map_err(serde::de::Error::custom)
    }
}

impl TryFrom<Vec<f64>> for Vector {
    type Error = OracleError;

    fn try_from(entries: Vec<f64>) -> Result<Self> {
        Vector::new(entries)
    }
}

impl Index<usize> for Vector {
    type Output = f64;

    fn index(&self, index: usize) -> &f64 {
        &self.0[index]
    }
}

impl<'a> IntoIterator for &'a Vector {
    type Item = &'a f64;
    type IntoIter = std::slice::Iter<'a, f64>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl Add for &Vector {
    type Output = Vector;

    fn add(self, rhs: &Vector) -> Vector {
        debug_assert_eq!(self.dim(), rhs.dim());
        Vector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &Vector {
    type Output = Vector;

    fn sub(self, rhs: &Vector) -> Vector {
        debug_assert_eq!(self.dim(), rhs.dim());
        Vector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Mul<f64> for &Vector {
    type Output = Vector;

    fn mul(self, rhs: f64) -> Vector {
        Vector(self.0.iter().map(|v| v * rhs).collect())
    }
}

impl Neg for &Vector {
    type Output = Vector;

    fn neg(self) -> Vector {
        Vector(self.0.iter().map(|v| -v).collect())
    }
}

impl fmt::Display for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_and_non_finite() {
        assert_eq!(Vector::new(vec![]), Err(OracleError::EmptyVector));
        assert_eq!(
            Vector::new(vec![1.0, f64::NAN]),
            Err(OracleError::NonFinite { index: 1 })
        );
        assert!(Vector::new(vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn arithmetic() {
        let a = Vector::new(vec![3.0, 4.0]).unwrap();
        let b = Vector::new(vec![1.0, -1.0]).unwrap();
        assert_eq!(a.norm(), 5.0);
        assert_eq!(a.dot(&b), -1.0);
        assert_eq!((&a - &b).as_slice(), &[2.0, 5.0]);
        assert_eq!((&a + &b).as_slice(), &[4.0, 3.0]);
        assert_eq!((&a * 2.0).as_slice(), &[6.0, 8.0]);
        assert_eq!(a.distance(&b), 29f64.sqrt());
    }

    #[test]
    fn scaled_rejects_overflow() {
        let a = Vector::new(vec![1e300]).unwrap();
        assert!(a.scaled(1e300).is_err());
    }

    #[test]
    fn deserialize_validates() {
        let ok: Vector = serde_json::from_str("[1.0, 2.0]").unwrap();
        assert_eq!(ok.dim(), 2);
        assert!(serde_json::from_str::<Vector>("[]").is_err());
    }
}
