//! V-representation polytopes: the convex hull of an explicit vertex list.

use serde::{Deserialize, Serialize};

use crate::error::{OracleError, Result};
use crate::mnp::{self, MnpOptions};
use crate::vector::Vector;

/// Convex hull of a non-empty list of same-dimension vertices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPolytope")]
pub struct Polytope {
    vertices: Vec<Vector>,
}

#[derive(Deserialize)]
struct RawPolytope {
    vertices: Vec<Vector>,
}

impl TryFrom<RawPolytope> for Polytope {
    type Error = OracleError;

    fn try_from(raw: RawPolytope) -> Result<Self> {
        Polytope::new(raw.vertices)
    }
}

impl Polytope {
    pub fn new(vertices: Vec<Vector>) -> Result<Self> {
        let first = vertices
            .first()
            .ok_or_else(|| OracleError::InvalidSet("polytope needs at least one vertex".into()))?;
        let dim = first.dim();
        if let Some(bad) = vertices.iter().find(|v| v.dim() != dim) {
            return Err(OracleError::InvalidSet(format!(
                "polytope vertices must share dimension {dim}, found {}",
                bad.dim()
            )));
        }
        Ok(Polytope { vertices })
    }

    pub fn dim(&self) -> usize {
        self.vertices[0].dim()
    }

    pub fn vertices(&self) -> &[Vector] {
        &self.vertices
    }

    /// Index of the vertex minimizing `<v, x>`; lowest index wins ties.
    pub fn argmin_vertex(&self, x: &Vector) -> usize {
        let mut best = 0;
        let mut best_value = self.vertices[0].dot(x);
        for (i, v) in self.vertices.iter().enumerate().skip(1) {
            let value = v.dot(x);
            if value < best_value {
                best = i;
                best_value = value;
            }
        }
        best
    }

    /// Vertices whose value `<v, x>` is within `tol` of the minimum.
    pub fn argmin_face(&self, x: &Vector, tol: f64) -> Vec<Vector> {
        let min = self
            .vertices
            .iter()
            .map(|v| v.dot(x))
            .fold(f64::INFINITY, f64::min);
        self.vertices
            .iter()
            .filter(|v| v.dot(x) <= min + tol)
            .cloned()
            .collect()
    }

    pub(crate) fn project(&self, x: &Vector) -> Result<Vector> {
        let options = MnpOptions::for_problem(self.dim(), self.vertices.len());
        let result = mnp::mnp_project(&self.vertices, x, &options)?;
        Ok(result.point)
    }

    pub(crate) fn diameter(&self) -> f64 {
        let mut best = 0.0f64;
        for (i, a) in self.vertices.iter().enumerate() {
            for b in &self.vertices[i + 1..] {
                best = best.max(a.distance(b));
            }
        }
        best
    }

    pub(crate) fn norm_bound(&self) -> f64 {
        self.vertices.iter().map(Vector::norm).fold(0.0, f64::max)
    }
}
