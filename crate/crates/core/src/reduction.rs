//! Approximate linear minimization through a single projection.
//!
//! For a compact convex `C`, the point `proj_C(-lambda x)` is a feasible
//! candidate for `argmin_{c in C} <c, x>`, and its duality gap is bounded by
//! `||p|| (||v|| - ||p||) / lambda` for any exact minimizer `v`. Taking
//! `lambda >= min{diam * bound, bound^2} / eps` makes the gap at most `eps`.
//! On polytopes a finite `lambda` already yields an exact minimizer, namely
//! the minimum-norm element of the minimizing face.

use serde::Serialize;

use crate::error::{OracleError, Result};
use crate::mnp::{self, MnpOptions};
use crate::sets::{ConvexSetOracle, Polytope, SetConstants};
use crate::vector::Vector;

/// Floor on `lambda` when `min{diam * bound, bound^2}` vanishes.
pub const LAMBDA_MIN: f64 = 1e-12;

/// Distance under which the projected point counts as the minimum-norm LMO point.
pub const MIN_NORM_MATCH_TOL: f64 = 1e-7;

pub const DEFAULT_MAX_DOUBLINGS: u32 = 64;

/// Scale-aware slack `1e-9 (1 + ||x||) (1 + norm_bound)` for certificate checks.
pub fn certificate_tolerance(x_norm: f64, norm_bound: f64) -> f64 {
    1e-9 * (1.0 + x_norm) * (1.0 + norm_bound)
}

/// Slack for membership checks on oracle outputs.
pub fn membership_tolerance(norm_bound: f64) -> f64 {
    1e-9 * (1.0 + norm_bound)
}

/// Duality-gap certificate for a candidate minimizer of `<., direction>`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapCertificate {
    pub point: Vector,
    pub direction: Vector,
    /// `<point, direction> - min_c <c, direction>`; `None` without an exact LMO.
    pub gap: Option<f64>,
    /// Right-hand side `||p|| (||v|| - ||p||) / lambda`, when a lambda was used.
    pub bound: Option<f64>,
    pub lambda: Option<f64>,
    /// The bound used the norm bound of the set in place of `||v||`.
    pub relaxed: bool,
}

impl GapCertificate {
    /// Both sides of the gap sandwich hold within `tol`.
    pub fn holds(&self, tol: f64) -> bool {
        match (self.gap, self.bound) {
            (Some(gap), Some(bound)) => gap >= -tol && gap <= bound + tol,
            (Some(gap), None) => gap >= -tol,
            (None, _) => true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApproxLmoResult {
    /// `proj_C(-lambda x)`.
    pub point: Vector,
    pub lambda: f64,
    /// Accuracy guaranteed by `lambda`, i.e. `min{diam * bound, bound^2} / lambda`.
    pub epsilon: f64,
    pub certificate: GapCertificate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LambdaStarResult {
    /// Smallest tried scale certified exact, or the best scale seen when not converged.
    pub lambda_star: f64,
    pub point: Vector,
    pub exactness_gap: f64,
    pub min_norm_match: bool,
    /// `||point - minnorm(argmin face)||`.
    pub min_norm_distance: f64,
    /// Number of doublings performed.
    pub search_iterations: u32,
    pub converged: bool,
}

fn lambda_numerator(constants: &SetConstants) -> f64 {
    let SetConstants {
        diameter,
        norm_bound,
    } = *constants;
    (diameter * norm_bound).min(norm_bound * norm_bound)
}

/// `min{diam * bound, bound^2} / epsilon`, floored at [`LAMBDA_MIN`].
pub fn choose_lambda(constants: &SetConstants, epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(OracleError::InvalidParameter(format!(
            "epsilon must be positive and finite, got {epsilon}"
        )));
    }
    let numerator = lambda_numerator(constants);
    if numerator <= 0.0 {
        return Ok(LAMBDA_MIN);
    }
    Ok((numerator / epsilon).max(LAMBDA_MIN))
}

/// The accuracy that `lambda` guarantees: `min{diam * bound, bound^2} / lambda`.
pub fn implied_epsilon(constants: &SetConstants, lambda: f64) -> f64 {
    lambda_numerator(constants) / lambda
}

/// `<a, x> - <v, x>`, clamped at zero once it is known to be within `-tol`.
fn clamped_gap(value: f64, tol: f64) -> Result<f64> {
    if value < -tol {
        return Err(OracleError::CertificateViolation(format!(
            "negative gap {value:e} below tolerance {tol:e}"
        )));
    }
    Ok(value.max(0.0))
}

/// Approximate LMO point `proj_C(-lambda x)` for an explicit `lambda`.
pub fn approx_lmo_with_lambda<S>(set: &S, x: &Vector, lambda: f64) -> Result<ApproxLmoResult>
where
    S: ConvexSetOracle + ?Sized,
{
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(OracleError::InvalidParameter(format!(
            "lambda must be positive and finite, got {lambda}"
        )));
    }
    x.expect_dim(set.dim())?;
    let constants = set.constants();
    let point = set.project(&x.scaled(-lambda)?)?;
    let p_norm = point.norm();

    let (gap, v_norm, relaxed) = if set.has_exact_lmo() {
        let v = set.lmo_exact(x)?;
        let tol = certificate_tolerance(x.norm(), constants.norm_bound);
        let gap = clamped_gap(point.dot(x) - v.dot(x), tol)?;
        (Some(gap), v.norm(), false)
    } else {
        (None, constants.norm_bound, true)
    };

    Ok(ApproxLmoResult {
        epsilon: implied_epsilon(&constants, lambda),
        lambda,
        certificate: GapCertificate {
            bound: Some(p_norm * (v_norm - p_norm) / lambda),
            point: point.clone(),
            direction: x.clone(),
            gap,
            lambda: Some(lambda),
            relaxed,
        },
        point,
    })
}

/// An `epsilon`-approximate LMO point with `lambda` chosen from the set constants.
pub fn approx_lmo<S>(set: &S, x: &Vector, epsilon: f64) -> Result<ApproxLmoResult>
where
    S: ConvexSetOracle + ?Sized,
{
    let lambda = choose_lambda(&set.constants(), epsilon)?;
    let mut result = approx_lmo_with_lambda(set, x, lambda)?;
    result.epsilon = epsilon;
    Ok(result)
}

/// Duality gap `<candidate, x> - min_c <c, x>` of a feasible candidate.
pub fn gap<S>(set: &S, candidate: &Vector, x: &Vector) -> Result<f64>
where
    S: ConvexSetOracle + ?Sized,
{
    x.expect_dim(set.dim())?;
    candidate.expect_dim(set.dim())?;
    let constants = set.constants();
    let member_tol = membership_tolerance(constants.norm_bound);
    let projected = set.project(candidate)?;
    let distance = candidate.distance(&projected);
    if distance > member_tol {
        return Err(OracleError::NotInSet {
            distance,
            tolerance: member_tol,
        });
    }
    let v = set.lmo_exact(x)?;
    clamped_gap(
        candidate.dot(x) - v.dot(x),
        certificate_tolerance(x.norm(), constants.norm_bound),
    )
}

/// Checks that `proj_C(x)` minimizes `<., proj_C(x) - x>` over `C`.
pub fn check_projlmo_identity<S>(set: &S, x: &Vector) -> Result<GapCertificate>
where
    S: ConvexSetOracle + ?Sized,
{
    let point = set.project(x)?;
    let direction = &point - x;
    let gap = gap(set, &point, &direction)?;
    Ok(GapCertificate {
        point,
        direction,
        gap: Some(gap),
        bound: None,
        lambda: None,
        relaxed: false,
    })
}

/// Default exactness tolerance for [`lambda_star_search`].
pub fn default_tol_exact(x: &Vector, constants: &SetConstants) -> f64 {
    certificate_tolerance(x.norm(), constants.norm_bound)
}

/// Doubles `lambda` from `lambda0` until `proj_C(-lambda x)` is an exact LMO point.
///
/// `lambda0` is always evaluated; `max_doublings` bounds the number of
/// subsequent doublings. On success the returned point is compared with the
/// minimum-norm element of the minimizing face.
pub fn lambda_star_search(
    polytope: &Polytope,
    x: &Vector,
    tol_exact: f64,
    lambda0: f64,
    max_doublings: u32,
) -> Result<LambdaStarResult> {
    x.expect_dim(polytope.dim())?;
    if !(lambda0 > 0.0 && lambda0.is_finite()) {
        return Err(OracleError::InvalidParameter(format!(
            "lambda0 must be positive, got {lambda0}"
        )));
    }
    if !(tol_exact > 0.0 && tol_exact.is_finite()) {
        return Err(OracleError::InvalidParameter(format!(
            "tol_exact must be positive, got {tol_exact}"
        )));
    }
    let vertices = polytope.vertices();
    let min_value = vertices[polytope.argmin_vertex(x)].dot(x);

    let mut lambda = lambda0;
    let mut doublings = 0;
    let mut best: Option<(f64, f64, Vector)> = None;
    let mut converged = false;
    while let Ok(target) = x.scaled(-lambda) {
        let point = polytope.project(&target)?;
        let exactness = (point.dot(x) - min_value).max(0.0);
        if best.as_ref().is_none_or(|(g, _, _)| exactness < *g) {
            best = Some((exactness, lambda, point));
        }
        if exactness <= tol_exact {
            converged = true;
            break;
        }
        if doublings >= max_doublings {
            break;
        }
        lambda *= 2.0;
        doublings += 1;
    }
    let (exactness_gap, lambda_star, point) = best.ok_or_else(|| {
        OracleError::InvalidParameter(format!("-lambda0 * x overflows for lambda0 = {lambda0}"))
    })?;

    let face = polytope.argmin_face(x, tol_exact);
    let options = MnpOptions::for_problem(polytope.dim(), face.len());
    let min_norm = mnp::min_norm_point(&face, &options)?.point;
    let min_norm_distance = point.distance(&min_norm);

    Ok(LambdaStarResult {
        lambda_star,
        point,
        exactness_gap,
        min_norm_match: converged && min_norm_distance <= MIN_NORM_MATCH_TOL,
        min_norm_distance,
        search_iterations: doublings,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sets::{ProjectionOnly, SetDescriptor};

    fn v(entries: &[f64]) -> Vector {
        Vector::new(entries.to_vec()).unwrap()
    }

    #[test]
    fn choose_lambda_examples() {
        // Square of side 2: diam 2 sqrt 2, bound sqrt 2, so min{4, 2} = 2.
        let cube = SetDescriptor::ball_inf(2, 1.0).unwrap();
        let lambda = choose_lambda(&cube.constants(), 0.1).unwrap();
        assert!((lambda - 20.0).abs() < 1e-12);

        let point = SetDescriptor::singleton(v(&[3.0, 1.0]));
        assert_eq!(choose_lambda(&point.constants(), 0.5).unwrap(), LAMBDA_MIN);
        assert_eq!(choose_lambda(&point.constants(), 1e-9).unwrap(), LAMBDA_MIN);

        let simplex = SetDescriptor::simplex(3).unwrap();
        assert!((choose_lambda(&simplex.constants(), 0.5).unwrap() - 2.0).abs() < 1e-15);

        assert!(choose_lambda(&simplex.constants(), 0.0).is_err());
        assert!(choose_lambda(&simplex.constants(), -1.0).is_err());
        assert!(choose_lambda(&simplex.constants(), f64::NAN).is_err());
    }

    #[test]
    fn approx_lmo_saturates_cube() {
        let cube = SetDescriptor::ball_inf(2, 1.0).unwrap();
        let r = approx_lmo(&cube, &v(&[1.0, 1.0]), 0.1).unwrap();
        assert_eq!(r.point, v(&[-1.0, -1.0]));
        assert_eq!(r.certificate.gap, Some(0.0));
        assert_eq!(r.epsilon, 0.1);
    }

    #[test]
    fn shifted_ball_at_lambda_100() {
        let ball = SetDescriptor::ball2(v(&[2.0, 2.0]), 1.0).unwrap();
        let r = approx_lmo_with_lambda(&ball, &v(&[1.0, 0.0]), 100.0).unwrap();
        // Independent closed form: p = c + (y - c)/||y - c|| with y = (-100, 0).
        let (dx, dy) = (-102.0f64, -2.0f64);
        let n = (dx * dx + dy * dy).sqrt();
        let expected = v(&[2.0 + dx / n, 2.0 + dy / n]);
        assert!(r.point.distance(&expected) < 1e-14);
        assert!((r.point[0] - 1.000192).abs() < 1e-6 && (r.point[1] - 1.980396).abs() < 1e-6);
        let gap = r.certificate.gap.unwrap();
        assert!((gap - (expected[0] - 1.0)).abs() < 1e-14);
        assert!((gap - 1.92e-4).abs() < 1e-6);
        let bound = r.certificate.bound.unwrap();
        assert!((bound - 3.867e-4).abs() < 1e-6);
        assert!(gap <= bound);
    }

    #[test]
    fn zero_direction_has_zero_gap() {
        let ball = SetDescriptor::ball2(v(&[2.0, 2.0]), 1.0).unwrap();
        for lambda in [1e-3, 1.0, 1e6] {
            let r = approx_lmo_with_lambda(&ball, &v(&[0.0, 0.0]), lambda).unwrap();
            assert_eq!(r.certificate.gap, Some(0.0));
        }
    }

    #[test]
    fn with_lambda_examples() {
        let ball = SetDescriptor::ball2(v(&[0.0, 0.0]), 1.0).unwrap();
        let r = approx_lmo_with_lambda(&ball, &v(&[1.0, 0.0]), 1.0).unwrap();
        assert_eq!(r.point, v(&[-1.0, 0.0]));
        assert_eq!(r.certificate.gap, Some(0.0));
        assert_eq!(r.certificate.bound, Some(0.0));

        let segment = SetDescriptor::new_box(v(&[-1.0]), v(&[1.0])).unwrap();
        let r = approx_lmo_with_lambda(&segment, &v(&[1.0]), 0.5).unwrap();
        assert_eq!(r.point, v(&[-0.5]));
        assert_eq!(r.certificate.gap, Some(0.5));
        assert_eq!(r.certificate.bound, Some(0.5));

        let simplex = SetDescriptor::simplex(3).unwrap();
        let r = approx_lmo_with_lambda(&simplex, &v(&[3.0, 1.0, 2.0]), 10.0).unwrap();
        assert!(r.certificate.gap.unwrap() <= 0.1);
        assert!(r.certificate.holds(1e-12));
    }

    #[test]
    fn relaxed_bound_without_lmo() {
        let ball = SetDescriptor::ball2(v(&[2.0, 2.0]), 1.0).unwrap();
        let hidden = ProjectionOnly(ball.clone());
        let x = v(&[1.0, 0.0]);
        let exact = approx_lmo_with_lambda(&ball, &x, 100.0).unwrap();
        let relaxed = approx_lmo_with_lambda(&hidden, &x, 100.0).unwrap();
        assert!(relaxed.certificate.relaxed);
        assert_eq!(relaxed.certificate.gap, None);
        assert_eq!(relaxed.point, exact.point);
        assert!(relaxed.certificate.bound.unwrap() >= exact.certificate.bound.unwrap());
        assert!(exact.certificate.gap.unwrap() <= relaxed.certificate.bound.unwrap());
    }

    #[test]
    fn gap_examples() {
        let simplex = SetDescriptor::simplex(3).unwrap();
        let x = v(&[3.0, 1.0, 2.0]);
        let lmo = simplex.lmo_exact(&x).unwrap();
        assert_eq!(gap(&simplex, &lmo, &x).unwrap(), 0.0);
        assert_eq!(gap(&simplex, &v(&[1.0, 0.0, 0.0]), &x).unwrap(), 2.0);

        let cube = SetDescriptor::ball_inf(2, 1.0).unwrap();
        assert_eq!(gap(&cube, &v(&[1.0, 1.0]), &v(&[1.0, 1.0])).unwrap(), 4.0);

        assert!(matches!(
            gap(&cube, &v(&[2.0, 0.0]), &v(&[1.0, 1.0])),
            Err(OracleError::NotInSet { .. })
        ));
        assert!(matches!(
            gap(&ProjectionOnly(cube), &v(&[1.0, 1.0]), &v(&[1.0, 1.0])),
            Err(OracleError::LmoUnavailable)
        ));
    }

    #[test]
    fn identity_examples() {
        let ball = SetDescriptor::ball2(v(&[0.0, 0.0]), 1.0).unwrap();
        let c = check_projlmo_identity(&ball, &v(&[0.2, 0.1])).unwrap();
        assert_eq!(c.direction, v(&[0.0, 0.0]));
        assert_eq!(c.gap, Some(0.0));

        let c = check_projlmo_identity(&ball, &v(&[3.0, 4.0])).unwrap();
        assert!(c.point.distance(&v(&[0.6, 0.8])) < 1e-15);
        assert!(c.direction.distance(&v(&[-2.4, -3.2])) < 1e-15);
        assert!(c.gap.unwrap() < 1e-14);

        let square = SetDescriptor::new_box(v(&[-1.0, -1.0]), v(&[1.0, 1.0])).unwrap();
        let c = check_projlmo_identity(&square, &v(&[2.0, 0.5])).unwrap();
        assert_eq!(c.point, v(&[1.0, 0.5]));
        assert_eq!(c.direction, v(&[-1.0, 0.0]));
        assert_eq!(c.gap, Some(0.0));
    }

    #[test]
    fn lambda_star_examples() {
        let cube = SetDescriptor::ball_inf(2, 1.0)
            .unwrap()
            .to_polytope()
            .unwrap();
        let x = v(&[0.5, -0.25]);
        let r = lambda_star_search(&cube, &x, 1e-9, 1.0, DEFAULT_MAX_DOUBLINGS).unwrap();
        assert!(r.converged && r.min_norm_match);
        assert_eq!(r.lambda_star, 4.0);
        assert_eq!(r.search_iterations, 2);
        assert_eq!(r.point, v(&[-1.0, 1.0]));
        assert_eq!(r.exactness_gap, 0.0);

        let single = Polytope::new(vec![v(&[1.0, 2.0])]).unwrap();
        let r = lambda_star_search(&single, &x, 1e-9, 3.0, 10).unwrap();
        assert!(r.converged);
        assert_eq!(r.lambda_star, 3.0);
        assert_eq!(r.exactness_gap, 0.0);

        let simplex = SetDescriptor::simplex(3).unwrap().to_polytope().unwrap();
        let r = lambda_star_search(&simplex, &v(&[3.0, 1.0, 2.0]), 1e-9, 1.0, 64).unwrap();
        assert!(r.converged && r.min_norm_match);
        assert_eq!(r.lambda_star, 1.0);
        assert!(r.point.distance(&v(&[0.0, 1.0, 0.0])) < 1e-15);
    }

    #[test]
    fn lambda_star_budget() {
        let cube = SetDescriptor::ball_inf(2, 1.0)
            .unwrap()
            .to_polytope()
            .unwrap();
        let x = v(&[0.5, -0.25]);
        let r = lambda_star_search(&cube, &x, 1e-9, 1.0, 0).unwrap();
        assert!(!r.converged && !r.min_norm_match);
        assert_eq!(r.search_iterations, 0);
        assert_eq!(r.lambda_star, 1.0);
        let r = lambda_star_search(&cube, &x, 1e-9, 1.0, 1).unwrap();
        assert!(!r.converged);
        assert_eq!(r.lambda_star, 2.0);
    }

    #[test]
    fn lambda_star_matches_min_norm_on_a_tied_face() {
        // Minimizing face of x = (0, 1) on the square is the bottom edge;
        // its minimum-norm element is (0, -1).
        let square = SetDescriptor::ball_inf(2, 1.0)
            .unwrap()
            .to_polytope()
            .unwrap();
        let r = lambda_star_search(&square, &v(&[0.0, 1.0]), 1e-9, 1.0, 64).unwrap();
        assert!(r.converged && r.min_norm_match);
        assert_eq!(r.point, v(&[0.0, -1.0]));
    }

    #[test]
    fn lambda_star_errors() {
        let cube = SetDescriptor::ball_inf(2, 1.0)
            .unwrap()
            .to_polytope()
            .unwrap();
        assert!(lambda_star_search(&cube, &v(&[1.0]), 1e-9, 1.0, 4).is_err());
        assert!(lambda_star_search(&cube, &v(&[1.0, 0.0]), 1e-9, 0.0, 4).is_err());
        assert!(lambda_star_search(&cube, &v(&[1.0, 0.0]), 0.0, 1.0, 4).is_err());
    }
}
