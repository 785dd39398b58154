//! Wolfe's minimum-norm-point algorithm, used to project onto `conv(V)`.
//!
//! Projecting `x` onto `conv(V)` is the minimum-norm point of `conv(V - x)`.
//! The iteration is carried out in the original coordinates: the affine
//! subproblems are solved on vertex differences, which keeps the linear
//! algebra on the scale of the polytope even when `x` is far away.

use nalgebra::{DMatrix, DVector};

use crate::error::{OracleError, Result};
use crate::vector::Vector;

pub const DEFAULT_TOLERANCE: f64 = 1e-10;

/// Relative conditioning threshold for the active differences, and the ridge used below it.
const GRAM_REGULARIZATION: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MnpOptions {
    /// Relative optimality tolerance; the stopping certificate is `tol * (1 + ||x||)`.
    pub tol: f64,
    /// Budget of major cycles.
    pub max_iter: usize,
}

impl MnpOptions {
    /// Defaults for a problem with `dim` coordinates and `vertex_count` vertices.
    pub fn for_problem(dim: usize, vertex_count: usize) -> Self {
        MnpOptions {
            tol: DEFAULT_TOLERANCE,
            max_iter: 100 * (dim + vertex_count),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MnpResult {
    pub point: Vector,
    /// Convex weights, one per input vertex.
    pub weights: Vec<f64>,
    /// Indices of the vertices with nonzero weight.
    pub active: Vec<usize>,
    /// `max_v <x - p, v - p>` at the returned point.
    pub certificate: f64,
    pub converged: bool,
    pub iterations: usize,
}

/// Outcome of one major cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MajorStep {
    /// No vertex improves on the current point at floating-point resolution.
    Optimal,
    /// A vertex was added and the distance decreased.
    Improved,
    /// Rounding prevented further descent; the state was left unchanged.
    Stalled,
}

/// Least-squares solution of `diffs * alpha ~ rhs` via Householder QR with one
/// refinement step, or `None` when the columns are numerically dependent.
fn least_squares_qr(diffs: &DMatrix<f64>, rhs: &DVector<f64>) -> Option<DVector<f64>> {
    let cols = diffs.ncols();
    if cols > diffs.nrows() {
        return None;
    }
    let scale = diffs
        .column_iter()
        .map(|c| c.norm_squared())
        .fold(f64::MIN_POSITIVE, f64::max);
    let qr = diffs.clone().qr();
    let r = qr.r();
    if (0..cols).any(|i| r[(i, i)] * r[(i, i)] <= GRAM_REGULARIZATION * scale) {
        return None;
    }
    let q = qr.q();
    let solve = |b: &DVector<f64>| r.solve_upper_triangular(&(q.transpose() * b));
    let mut alpha = solve(rhs)?;
    let residual = rhs - diffs * &alpha;
    alpha += solve(&residual)?;
    Some(alpha)
}

/// Working state of the algorithm. Exposed so the per-cycle invariants can be inspected.
#[derive(Debug, Clone)]
pub struct MnpState<'a> {
    vertices: &'a [Vector],
    target: &'a Vector,
    active: Vec<usize>,
    weights: Vec<f64>,
    point: Vector,
    distance_sq: f64,
    iteration: usize,
    tolerance: f64,
}

fn validate(vertices: &[Vector], x: &Vector, tol: f64) -> Result<()> {
    if vertices.is_empty() {
        return Err(OracleError::InvalidParameter("vertex list is empty".into()));
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(OracleError::InvalidParameter(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    for v in vertices {
        v.expect_dim(x.dim())?;
    }
    Ok(())
}

impl<'a> MnpState<'a> {
    /// Starts from the vertex nearest to `target`.
    pub fn new(vertices: &'a [Vector], target: &'a Vector, tol: f64) -> Result<Self> {
        validate(vertices, target, tol)?;
        let mut start = 0;
        let mut best = f64::INFINITY;
        for (i, v) in vertices.iter().enumerate() {
            let d = v.distance(target);
            if d < best {
                best = d;
                start = i;
            }
        }
        Ok(MnpState {
            vertices,
            target,
            active: vec![start],
            weights: vec![1.0],
            point: vertices[start].clone(),
            distance_sq: best * best,
            iteration: 0,
            tolerance: tol * (1.0 + target.norm()),
        })
    }

    pub fn active_vertices(&self) -> &[usize] {
        &self.active
    }

    /// Weights aligned with [`MnpState::active_vertices`].
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn current_point(&self) -> &Vector {
        &self.point
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    /// Absolute stopping tolerance `tol * (1 + ||x||)`.
    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn distance(&self) -> f64 {
        self.distance_sq.sqrt()
    }

    /// The most improving vertex and `max_v <x - p, v - p>`.
    pub fn certificate(&self) -> (usize, f64) {
        let residual = self.target - &self.point;
        let base = residual.dot(&self.point);
        let mut best = 0;
        let mut best_value = f64::NEG_INFINITY;
        for (i, v) in self.vertices.iter().enumerate() {
            let value = residual.dot(v);
            if value > best_value {
                best = i;
                best_value = value;
            }
        }
        (best, best_value - base)
    }

    /// Rounding level of the certificate at the current point.
    fn noise_floor(&self) -> f64 {
        let spread = self
            .vertices
            .iter()
            .map(|v| v.distance(&self.point))
            .fold(0.0, f64::max);
        64.0 * f64::EPSILON * (self.distance() + self.point.norm() + 1.0) * (spread + 1.0)
    }

    fn combine(&self, active: &[usize], weights: &[f64]) -> Vector {
        let mut out = vec![0.0; self.target.dim()];
        for (&i, &w) in active.iter().zip(weights) {
            for (o, v) in out.iter_mut().zip(self.vertices[i].iter()) {
                *o += w * v;
            }
        }
        Vector::from_vec_unchecked(out)
    }

    /// Weights of the point of `aff(active)` nearest to the target.
    fn affine_minimizer(&self, active: &[usize]) -> Vec<f64> {
        let m = active.len();
        if m == 1 {
            return vec![1.0];
        }
        let dim = self.target.dim();
        let base = &self.vertices[active[0]];
        let diffs = DMatrix::from_fn(dim, m - 1, |r, c| self.vertices[active[c + 1]][r] - base[r]);
        let rhs_vec = DVector::from_fn(dim, |r, _| self.target[r] - base[r]);
        let alpha = match least_squares_qr(&diffs, &rhs_vec) {
            Some(alpha) => alpha,
            None => {
                // Nearly affinely dependent active set: ridge the normal equations.
                let mut gram = diffs.transpose() * &diffs;
                let scale = (0..m - 1)
                    .map(|i| gram[(i, i)])
                    .fold(f64::MIN_POSITIVE, f64::max);
                for i in 0..m - 1 {
                    gram[(i, i)] += GRAM_REGULARIZATION * scale;
                }
                let rhs = diffs.transpose() * &rhs_vec;
                match gram.clone().cholesky() {
                    Some(chol) => chol.solve(&rhs),
                    None => gram
                        .lu()
                        .solve(&rhs)
                        .unwrap_or_else(|| DVector::zeros(m - 1)),
                }
            }
        };
        let mut beta = Vec::with_capacity(m);
        beta.push(1.0 - alpha.sum());
        beta.extend(alpha.iter().copied());
        beta
    }

    /// Runs minor cycles on `active` (starting from `weights`) until the
    /// affine minimizer lies in the relative interior of the active hull.
    fn minor_cycles(
        &self,
        mut active: Vec<usize>,
        mut weights: Vec<f64>,
    ) -> (Vec<usize>, Vec<f64>) {
        loop {
            let beta = self.affine_minimizer(&active);
            if beta.iter().all(|b| *b > 0.0) {
                let total: f64 = beta.iter().sum();
                return (active, beta.into_iter().map(|b| b / total).collect());
            }
            let mut theta = 1.0;
            let mut blocking = usize::MAX;
            for (i, (&w, &b)) in weights.iter().zip(&beta).enumerate() {
                if b <= 0.0 {
                    let t = if w - b > 0.0 { w / (w - b) } else { 0.0 };
                    if t < theta || blocking == usize::MAX {
                        theta = t;
                        blocking = i;
                    }
                }
            }
            for (w, b) in weights.iter_mut().zip(&beta) {
                *w = (1.0 - theta) * *w + theta * b;
            }
            weights[blocking] = 0.0;
            let mut kept_active = Vec::with_capacity(active.len());
            let mut kept_weights = Vec::with_capacity(active.len());
            for (i, w) in active.iter().zip(&weights) {
                if *w > 0.0 {
                    kept_active.push(*i);
                    kept_weights.push(*w);
                }
            }
            let total: f64 = kept_weights.iter().sum();
            kept_weights.iter_mut().for_each(|w| *w /= total);
            active = kept_active;
            weights = kept_weights;
        }
    }

    /// One major cycle: add the most improving vertex, then restore feasibility.
    pub fn major_cycle(&mut self) -> MajorStep {
        let (entering, certificate) = self.certificate();
        if certificate <= self.noise_floor() {
            return MajorStep::Optimal;
        }
        if self.active.contains(&entering) {
            return MajorStep::Stalled;
        }
        self.iteration += 1;

        let mut active = self.active.clone();
        let mut weights = self.weights.clone();
        active.push(entering);
        weights.push(0.0);
        let (active, weights) = self.minor_cycles(active, weights);

        let point = self.combine(&active, &weights);
        let distance_sq = point.distance(self.target).powi(2);
        if distance_sq >= self.distance_sq {
            return MajorStep::Stalled;
        }
        self.active = active;
        self.weights = weights;
        self.point = point;
        self.distance_sq = distance_sq;
        MajorStep::Improved
    }

    fn finish(self) -> MnpResult {
        let (_, certificate) = self.certificate();
        let mut weights = vec![0.0; self.vertices.len()];
        for (&i, &w) in self.active.iter().zip(&self.weights) {
            weights[i] += w;
        }
        MnpResult {
            converged: certificate <= self.tolerance,
            certificate,
            weights,
            active: self.active,
            point: self.point,
            iterations: self.iteration,
        }
    }
}

/// Projects `x` onto `conv(vertices)`.
pub fn mnp_project(vertices: &[Vector], x: &Vector, options: &MnpOptions) -> Result<MnpResult> {
    if options.max_iter == 0 {
        return Err(OracleError::InvalidParameter(
            "max_iter must be positive".into(),
        ));
    }
    let mut state = MnpState::new(vertices, x, options.tol)?;
    while state.iteration() < options.max_iter {
        if state.major_cycle() != MajorStep::Improved {
            break;
        }
    }
    Ok(state.finish())
}

/// Element of `conv(vertices)` with the smallest Euclidean norm.
pub fn min_norm_point(vertices: &[Vector], options: &MnpOptions) -> Result<MnpResult> {
    let dim = vertices
        .first()
        .ok_or_else(|| OracleError::InvalidParameter("vertex list is empty".into()))?
        .dim();
    let origin = Vector::zeros(dim)?;
    mnp_project(vertices, &origin, options)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(entries: &[f64]) -> Vector {
        Vector::new(entries.to_vec()).unwrap()
    }

    fn triangle() -> Vec<Vector> {
        vec![v(&[0.0, 0.0]), v(&[1.0, 0.0]), v(&[0.0, 1.0])]
    }

    fn options() -> MnpOptions {
        MnpOptions::for_problem(2, 3)
    }

    /// Minimizes `||a + t (b - a) - x||` over a fine grid of `t in [0, 1]`.
    fn segment_brute_force(a: &Vector, b: &Vector, x: &Vector) -> Vector {
        let steps = 200_000;
        let mut best = (f64::INFINITY, a.clone());
        for k in 0..=steps {
            let t = k as f64 / steps as f64;
            let p = &(a * (1.0 - t)) + &(b * t);
            let d = p.distance(x);
            if d < best.0 {
                best = (d, p);
            }
        }
        best.1
    }

    #[test]
    fn projects_onto_hypotenuse() {
        let verts = triangle();
        let x = v(&[1.0, 1.0]);
        let oracle = segment_brute_force(&verts[1], &verts[2], &x);
        assert!((oracle[0] - 0.5).abs() < 1e-5 && (oracle[1] - 0.5).abs() < 1e-5);
        let r = mnp_project(&verts, &x, &options()).unwrap();
        assert!(r.converged);
        assert!(r.point.distance(&v(&[0.5, 0.5])) < 1e-12);
        assert!(r.point.distance(&oracle) < 1e-5);
        assert_eq!(r.weights[0], 0.0);
    }

    #[test]
    fn interior_point_is_fixed() {
        let r = mnp_project(&triangle(), &v(&[0.2, 0.3]), &options()).unwrap();
        assert!(r.converged);
        assert!(r.point.distance(&v(&[0.2, 0.3])) < 1e-12);
        assert!((r.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn nearest_vertex() {
        let r = mnp_project(&triangle(), &v(&[-1.0, -1.0]), &options()).unwrap();
        assert!(r.converged);
        assert_eq!(r.point, v(&[0.0, 0.0]));
        assert_eq!(r.active, vec![0]);
    }

    #[test]
    fn min_norm_examples() {
        let opts = options();
        let seg = [v(&[1.0, 0.0]), v(&[0.0, 1.0])];
        let oracle = segment_brute_force(&seg[0], &seg[1], &v(&[0.0, 0.0]));
        let r = min_norm_point(&seg, &opts).unwrap();
        assert!(r.point.distance(&v(&[0.5, 0.5])) < 1e-12);
        assert!(r.point.distance(&oracle) < 1e-5);

        let r = min_norm_point(&[v(&[2.0, 2.0])], &opts).unwrap();
        assert_eq!(r.point, v(&[2.0, 2.0]));
        assert!(r.converged);

        let seg = [v(&[-1.0, 1.0]), v(&[1.0, 1.0])];
        let oracle = segment_brute_force(&seg[0], &seg[1], &v(&[0.0, 0.0]));
        let r = min_norm_point(&seg, &opts).unwrap();
        assert!(r.point.distance(&v(&[0.0, 1.0])) < 1e-12);
        assert!(r.point.distance(&oracle) < 1e-5);
    }

    #[test]
    fn far_targets_land_on_exact_vertex() {
        let verts = triangle();
        let r = mnp_project(&verts, &v(&[-3e9, 1e9]), &options()).unwrap();
        assert_eq!(r.point, v(&[0.0, 1.0]));
    }

    #[test]
    fn duplicate_and_interior_vertices() {
        let verts = vec![
            v(&[0.0, 0.0]),
            v(&[1.0, 0.0]),
            v(&[1.0, 0.0]),
            v(&[0.2, 0.2]),
            v(&[0.0, 1.0]),
        ];
        let r = mnp_project(&verts, &v(&[2.0, 2.0]), &MnpOptions::for_problem(2, 5)).unwrap();
        assert!(r.converged);
        assert!(r.point.distance(&v(&[0.5, 0.5])) < 1e-12);
    }

    #[test]
    fn input_errors() {
        let opts = options();
        assert!(mnp_project(&[], &v(&[0.0]), &opts).is_err());
        assert!(mnp_project(&triangle(), &v(&[0.0]), &opts).is_err());
        let bad = MnpOptions {
            tol: 0.0,
            max_iter: 10,
        };
        assert!(mnp_project(&triangle(), &v(&[0.0, 0.0]), &bad).is_err());
        assert!(min_norm_point(&[], &opts).is_err());
    }

    #[test]
    fn budget_exhaustion_is_flagged() {
        // An interior target of a hexagon needs more than one major cycle.
        let verts: Vec<Vector> = (0..6)
            .map(|k| {
                let a = k as f64 * std::f64::consts::PI / 3.0;
                v(&[a.cos(), a.sin()])
            })
            .collect();
        let opts = MnpOptions {
            tol: 1e-10,
            max_iter: 1,
        };
        let r = mnp_project(&verts, &v(&[0.3, 0.2]), &opts).unwrap();
        assert!(!r.converged);
        assert_eq!(r.iterations, 1);
    }
}
