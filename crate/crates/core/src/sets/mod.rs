//! The convex-set oracle contract and the catalog of closed-form sets.

mod polytope;
mod simplex;
pub mod spec;

use serde::{Deserialize, Serialize};

use crate::error::{OracleError, Result};
use crate::vector::Vector;

pub use polytope::Polytope;
pub(crate) use simplex::project_scaled_simplex;

/// Largest dimension for which box-like sets are expanded into their `2^n` corners.
pub const MAX_CORNER_DIM: usize = 16;

/// Diameter and norm bound of a compact set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SetConstants {
    /// `sup ||c1 - c2||` over the set.
    pub diameter: f64,
    /// `sup ||c||` over the set.
    pub norm_bound: f64,
}

impl SetConstants {
    pub fn new(diameter: f64, norm_bound: f64) -> Result<Self> {
        if !(diameter.is_finite() && norm_bound.is_finite()) || diameter < 0.0 || norm_bound < 0.0 {
            return Err(OracleError::InvalidSet(format!(
                "constants must be finite and nonnegative (diameter {diameter}, norm bound {norm_bound})"
            )));
        }
        // Triangle inequality, with a little room for rounding.
        if diameter > 2.0 * norm_bound * (1.0 + 1e-12) + 1e-300 {
            return Err(OracleError::InvalidSet(format!(
                "diameter {diameter} exceeds twice the norm bound {norm_bound}"
            )));
        }
        Ok(SetConstants {
            diameter,
            norm_bound,
        })
    }
}

/// Behavioral contract for a compact convex set.
pub trait ConvexSetOracle {
    fn dim(&self) -> usize;

    /// Euclidean projection onto the set.
    fn project(&self, x: &Vector) -> Result<Vector>;

    /// A deterministic selection of `argmin_{c in C} <c, x>`.
    fn lmo_exact(&self, _x: &Vector) -> Result<Vector> {
        Err(OracleError::LmoUnavailable)
    }

    fn has_exact_lmo(&self) -> bool {
        true
    }

    fn constants(&self) -> SetConstants;

    /// `true` iff `dist(x, C) <= tol`, measured through the projection.
    fn contains(&self, x: &Vector, tol: f64) -> Result<bool> {
        let p = self.project(x)?;
        Ok(x.distance(&p) <= tol)
    }
}

/// Hides the exact LMO of an inner oracle, leaving only the projection.
#[derive(Debug, Clone)]
pub struct ProjectionOnly<S>(pub S);

impl<S: ConvexSetOracle> ConvexSetOracle for ProjectionOnly<S> {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn project(&self, x: &Vector) -> Result<Vector> {
        self.0.project(x)
    }

    fn has_exact_lmo(&self) -> bool {
        false
    }

    fn constants(&self) -> SetConstants {
        self.0.constants()
    }
}

/// The catalog of sets with closed-form (or vertex-based) oracles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SetDescriptor {
    /// Axis-aligned box `[lower, upper]`.
    Box {
        lower: Vector,
        upper: Vector,
    },
    /// Euclidean ball around `center`.
    Ball2 {
        center: Vector,
        radius: f64,
    },
    /// Origin-centered l1 ball in `dim` dimensions.
    Ball1 {
        dim: usize,
        radius: f64,
    },
    /// Origin-centered l-infinity ball in `dim` dimensions.
    BallInf {
        dim: usize,
        radius: f64,
    },
    /// Probability simplex in `dim` dimensions.
    Simplex {
        dim: usize,
    },
    Polytope(Polytope),
    Singleton {
        point: Vector,
    },
}

impl SetDescriptor {
    pub fn new_box(lower: Vector, upper: Vector) -> Result<Self> {
        Self::Box { lower, upper }.validated()
    }

    pub fn ball2(center: Vector, radius: f64) -> Result<Self> {
        Self::Ball2 { center, radius }.validated()
    }

    pub fn ball1(dim: usize, radius: f64) -> Result<Self> {
        Self::Ball1 { dim, radius }.validated()
    }

    pub fn ball_inf(dim: usize, radius: f64) -> Result<Self> {
        Self::BallInf { dim, radius }.validated()
    }

    pub fn simplex(dim: usize) -> Result<Self> {
        Self::Simplex { dim }.validated()
    }

    pub fn polytope(vertices: Vec<Vector>) -> Result<Self> {
        Ok(Self::Polytope(Polytope::new(vertices)?))
    }

    pub fn singleton(point: Vector) -> Self {
        Self::Singleton { point }
    }

    /// Checks the constructor invariants; consumes and returns `self` on success.
    pub fn validated(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, r: f64| {
            if r.is_finite() && r > 0.0 {
                Ok(())
            } else {
                Err(OracleError::InvalidSet(format!(
                    "{name} radius must be positive, got {r}"
                )))
            }
        };
        let nonzero_dim = |dim: usize| {
            if dim >= 1 {
                Ok(())
            } else {
                Err(OracleError::InvalidSet(
                    "dimension must be at least 1".into(),
                ))
            }
        };
        match self {
            Self::Box { lower, upper } => {
                if lower.dim() != upper.dim() {
                    return Err(OracleError::InvalidSet(format!(
                        "box bounds have dimensions {} and {}",
                        lower.dim(),
                        upper.dim()
                    )));
                }
                if let Some(i) = (0..lower.dim()).find(|&i| lower[i] > upper[i]) {
                    return Err(OracleError::InvalidSet(format!(
                        "box lower bound exceeds upper bound at index {i} ({} > {})",
                        lower[i], upper[i]
                    )));
                }
                Ok(())
            }
            Self::Ball2 { radius, .. } => positive("ball2", *radius),
            Self::Ball1 { dim, radius } => {
                nonzero_dim(*dim)?;
                positive("ball1", *radius)
            }
            Self::BallInf { dim, radius } => {
                nonzero_dim(*dim)?;
                positive("ballinf", *radius)
            }
            Self::Simplex { dim } => nonzero_dim(*dim),
            Self::Polytope(_) | Self::Singleton { .. } => Ok(()),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Box { .. } => "box",
            Self::Ball2 { .. } => "ball2",
            Self::Ball1 { .. } => "ball1",
            Self::BallInf { .. } => "ballinf",
            Self::Simplex { .. } => "simplex",
            Self::Polytope(_) => "polytope",
            Self::Singleton { .. } => "singleton",
        }
    }

    pub fn is_polyhedral(&self) -> bool {
        !matches!(self, Self::Ball2 { .. })
    }

    /// Vertex list of a polyhedral catalog set.
    pub fn to_polytope(&self) -> Result<Polytope> {
        let corners = |lower: &[f64], upper: &[f64]| -> Result<Vec<Vector>> {
            let n = lower.len();
            if n > MAX_CORNER_DIM {
                return Err(OracleError::InvalidParameter(format!(
                    "refusing to enumerate 2^{n} box corners (limit dimension {MAX_CORNER_DIM})"
                )));
            }
            (0..1usize << n)
                .map(|mask| {
                    Vector::new(
                        (0..n)
                            .map(|i| {
                                if mask >> i & 1 == 1 {
                                    upper[i]
                                } else {
                                    lower[i]
                                }
                            })
                            .collect(),
                    )
                })
                .collect()
        };
        let vertices = match self {
            Self::Box { lower, upper } => corners(lower.as_slice(), upper.as_slice())?,
            Self::BallInf { dim, radius } => corners(&vec![-radius; *dim], &vec![*radius; *dim])?,
            Self::Ball1 { dim, radius } => {
                let mut out = Vec::with_capacity(2 * dim);
                for i in 0..*dim {
                    out.push(Vector::basis(*dim, i, *radius)?);
                    out.push(Vector::basis(*dim, i, -radius)?);
                }
                out
            }
            Self::Simplex { dim } => (0..*dim)
                .map(|i| Vector::basis(*dim, i, 1.0))
                .collect::<Result<_>>()?,
            Self::Polytope(p) => return Ok(p.clone()),
            Self::Singleton { point } => vec![point.clone()],
            Self::Ball2 { .. } => {
                return Err(OracleError::InvalidSet(
                    "a Euclidean ball has no vertex representation".into(),
                ))
            }
        };
        Polytope::new(vertices)
    }
}

/// `sgn` with `sgn(0) = 1`, the tie-break used by the box-like LMOs.
fn sign_ties_positive(v: f64) -> f64 {
    if v >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// Lowest index attaining the minimum of `key`.
fn argmin_by(values: &[f64], key: impl Fn(f64) -> f64) -> usize {
    let mut best = 0;
    let mut best_key = key(values[0]);
    for (i, v) in values.iter().enumerate().skip(1) {
        let k = key(*v);
        if k < best_key {
            best = i;
            best_key = k;
        }
    }
    best
}

impl ConvexSetOracle for SetDescriptor {
    fn dim(&self) -> usize {
        match self {
            Self::Box { lower, .. } => lower.dim(),
            Self::Ball2 { center, .. } => center.dim(),
            Self::Ball1 { dim, .. } | Self::BallInf { dim, .. } | Self::Simplex { dim } => *dim,
            Self::Polytope(p) => p.dim(),
            Self::Singleton { point } => point.dim(),
        }
    }

    fn project(&self, x: &Vector) -> Result<Vector> {
        x.expect_dim(self.dim())?;
        let xs = x.as_slice();
        let out = match self {
            Self::Box { lower, upper } => xs
                .iter()
                .zip(lower.iter().zip(upper.iter()))
                .map(|(v, (l, u))| v.clamp(*l, *u))
                .collect(),
            Self::BallInf { radius, .. } => xs.iter().map(|v| v.clamp(-radius, *radius)).collect(),
            Self::Ball2 { center, radius } => {
                let offset = x - center;
                let dist = offset.norm();
                if dist <= *radius {
                    return Ok(x.clone());
                }
                center
                    .iter()
                    .zip(offset.iter())
                    .map(|(c, d)| c + radius * (d / dist))
                    .collect()
            }
            Self::Ball1 { radius, .. } => {
                if xs.iter().map(|v| v.abs()).sum::<f64>() <= *radius {
                    return Ok(x.clone());
                }
                let magnitudes: Vec<f64> = xs.iter().map(|v| v.abs()).collect();
                project_scaled_simplex(&magnitudes, *radius)
                    .into_iter()
                    .zip(xs)
                    .map(|(m, v)| m.copysign(*v))
                    .collect()
            }
            Self::Simplex { .. } => project_scaled_simplex(xs, 1.0),
            Self::Polytope(p) => return p.project(x),
            Self::Singleton { point } => return Ok(point.clone()),
        };
        Vector::new(out)
    }

    fn lmo_exact(&self, x: &Vector) -> Result<Vector> {
        x.expect_dim(self.dim())?;
        let xs = x.as_slice();
        let n = self.dim();
        match self {
            Self::Box { lower, upper } => Vector::new(
                xs.iter()
                    .zip(lower.iter().zip(upper.iter()))
                    .map(|(v, (l, u))| if *v < 0.0 { *u } else { *l })
                    .collect(),
            ),
            Self::BallInf { radius, .. } => Vector::new(
                xs.iter()
                    .map(|v| -radius * sign_ties_positive(*v))
                    .collect(),
            ),
            Self::Ball2 { center, radius } => {
                let norm = x.norm();
                if norm == 0.0 {
                    let mut out = center.as_slice().to_vec();
                    out[0] -= radius;
                    return Vector::new(out);
                }
                Vector::new(
                    center
                        .iter()
                        .zip(xs)
                        .map(|(c, v)| c - radius * (v / norm))
                        .collect(),
                )
            }
            Self::Ball1 { radius, .. } => {
                let k = argmin_by(xs, |v| -v.abs());
                Vector::basis(n, k, -radius * sign_ties_positive(xs[k]))
            }
            Self::Simplex { .. } => Vector::basis(n, argmin_by(xs, |v| v), 1.0),
            Self::Polytope(p) => Ok(p.vertices()[p.argmin_vertex(x)].clone()),
            Self::Singleton { point } => Ok(point.clone()),
        }
    }

    fn constants(&self) -> SetConstants {
        let (diameter, norm_bound) = match self {
            Self::Box { lower, upper } => (
                lower.distance(upper),
                lower
                    .iter()
                    .zip(upper.iter())
                    .map(|(l, u)| (l * l).max(u * u))
                    .sum::<f64>()
                    .sqrt(),
            ),
            Self::Ball2 { center, radius } => (2.0 * radius, center.norm() + radius),
            Self::Ball1 { radius, .. } => (2.0 * radius, *radius),
            Self::BallInf { dim, radius } => {
                let root = (*dim as f64).sqrt();
                (2.0 * radius * root, radius * root)
            }
            Self::Simplex { dim } => (if *dim >= 2 { 2f64.sqrt() } else { 0.0 }, 1.0),
            Self::Polytope(p) => (p.diameter(), p.norm_bound()),
            Self::Singleton { point } => (0.0, point.norm()),
        };
        SetConstants {
            diameter,
            norm_bound,
        }
    }
}
