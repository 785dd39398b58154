//! Seeded randomized property suites over the oracle catalog.
//!
//! Each [`Check`] draws a set (fixed or random), a direction and whatever
//! scalars it needs from a per-trial RNG stream, and reports a slack:
//! the amount by which the checked inequality's left side exceeds its right
//! side. A trial passes when the slack is `<= 0`.

use std::fmt;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{OracleError, Result};
use crate::exec::{trial_rng, Execution};
use crate::mnp::{self, MnpOptions};
use crate::reduction::{
    self, approx_lmo, approx_lmo_with_lambda, certificate_tolerance, membership_tolerance,
    MIN_NORM_MATCH_TOL,
};
use crate::sets::{ConvexSetOracle, Polytope, SetDescriptor};
use crate::vector::Vector;

pub const MAX_RANDOM_DIM: usize = 16;
pub const MAX_POLYTOPE_DIM: usize = 6;
pub const MAX_POLYTOPE_VERTICES: usize = 12;
/// Corner count up to which box-like sets also run the vertex-based checks.
const MAX_ENUMERATED_VERTICES: usize = 64;
/// Smallest separation of vertex values `<v, x>` accepted for the exactness search.
const MIN_PRODUCT_SEPARATION: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SetKind {
    Box,
    Ball2,
    Ball1,
    BallInf,
    Simplex,
    Polytope,
    Singleton,
}

impl SetKind {
    pub const ALL: [SetKind; 7] = [
        SetKind::Box,
        SetKind::Ball2,
        SetKind::Ball1,
        SetKind::BallInf,
        SetKind::Simplex,
        SetKind::Polytope,
        SetKind::Singleton,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SetKind::Box => "box",
            SetKind::Ball2 => "ball2",
            SetKind::Ball1 => "ball1",
            SetKind::BallInf => "ballinf",
            SetKind::Simplex => "simplex",
            SetKind::Polytope => "polytope",
            SetKind::Singleton => "singleton",
        }
    }
}

fn uniform_vector<R: Rng>(rng: &mut R, dim: usize, lo: f64, hi: f64) -> Vector {
    Vector::from_vec_unchecked((0..dim).map(|_| rng.random_range(lo..hi)).collect())
}

/// `exp(U(ln lo, ln hi))`.
pub fn log_uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo.ln()..=hi.ln()).exp()
}

/// Standard normal entries times a log-uniform scale in `[0.1, 30]`.
pub fn random_direction<R: Rng>(rng: &mut R, dim: usize) -> Vector {
    let scale = log_uniform(rng, 0.1, 30.0);
    Vector::from_vec_unchecked(
        (0..dim)
            .map(|_| {
                let z: f64 = StandardNormal.sample(rng);
                scale * z
            })
            .collect::<Vec<f64>>(),
    )
}

pub fn random_polytope<R: Rng>(rng: &mut R, max_dim: usize, max_vertices: usize) -> Polytope {
    let dim = rng.random_range(1..=max_dim);
    let count = rng.random_range(1..=max_vertices);
    let vertices = (0..count)
        .map(|_| uniform_vector(rng, dim, -5.0, 5.0))
        .collect();
    Polytope::new(vertices).expect("vertices share a dimension")
}

/// A random instance of `kind`: coordinates in `[-5, 5]`, radii in `[0.1, 5]`.
pub fn random_set<R: Rng>(rng: &mut R, kind: SetKind, max_dim: usize) -> SetDescriptor {
    let dim = rng.random_range(1..=max_dim);
    let radius = |rng: &mut R| rng.random_range(0.1..5.0);
    let set = match kind {
        SetKind::Box => {
            let lower = uniform_vector(rng, dim, -5.0, 5.0);
            let upper = lower
                .map(|l| l + rng.random_range(0.0..4.0))
                .expect("finite bounds");
            SetDescriptor::Box { lower, upper }
        }
        SetKind::Ball2 => SetDescriptor::Ball2 {
            center: uniform_vector(rng, dim, -5.0, 5.0),
            radius: radius(rng),
        },
        SetKind::Ball1 => SetDescriptor::Ball1 {
            dim,
            radius: radius(rng),
        },
        SetKind::BallInf => SetDescriptor::BallInf {
            dim,
            radius: radius(rng),
        },
        SetKind::Simplex => SetDescriptor::Simplex { dim },
        SetKind::Polytope => SetDescriptor::Polytope(random_polytope(
            rng,
            MAX_POLYTOPE_DIM.min(max_dim),
            MAX_POLYTOPE_VERTICES,
        )),
        SetKind::Singleton => SetDescriptor::Singleton {
            point: uniform_vector(rng, dim, -5.0, 5.0),
        },
    };
    set.validated()
        .expect("random sets satisfy their invariants")
}

/// Where each trial's set comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum SetSource {
    Fixed(SetDescriptor),
    Random(SetKind),
    /// Kind drawn uniformly per trial.
    AnyKind,
}

impl SetSource {
    fn draw<R: Rng>(&self, rng: &mut R) -> SetDescriptor {
        match self {
            SetSource::Fixed(set) => set.clone(),
            SetSource::Random(kind) => random_set(rng, *kind, MAX_RANDOM_DIM),
            SetSource::AnyKind => {
                let kind = SetKind::ALL[rng.random_range(0..SetKind::ALL.len())];
                random_set(rng, kind, MAX_RANDOM_DIM)
            }
        }
    }
}

/// `min_{c in C} <c, x>` from the support function of each set, without the LMO.
pub fn reference_min_value(set: &SetDescriptor, x: &Vector) -> f64 {
    match set {
        SetDescriptor::Box { lower, upper } => x
            .iter()
            .zip(lower.iter().zip(upper.iter()))
            .map(|(v, (l, u))| (v * l).min(v * u))
            .sum(),
        SetDescriptor::Ball2 { center, radius } => center.dot(x) - radius * x.norm(),
        SetDescriptor::Ball1 { radius, .. } => {
            -radius * x.iter().fold(0.0f64, |m, v| m.max(v.abs()))
        }
        SetDescriptor::BallInf { radius, .. } => -radius * x.iter().map(|v| v.abs()).sum::<f64>(),
        SetDescriptor::Simplex { .. } => x.iter().copied().fold(f64::INFINITY, f64::min),
        SetDescriptor::Polytope(p) => p
            .vertices()
            .iter()
            .map(|v| v.dot(x))
            .fold(f64::INFINITY, f64::min),
        SetDescriptor::Singleton { point } => point.dot(x),
    }
}

/// Vertex list of a polyhedral set, if small enough to enumerate.
fn enumerable_vertices(set: &SetDescriptor) -> Option<Polytope> {
    let count = match set {
        SetDescriptor::Polytope(p) => return Some(p.clone()),
        SetDescriptor::Ball2 { .. } => return None,
        SetDescriptor::Box { .. } | SetDescriptor::BallInf { .. } => {
            if set.dim() > 6 {
                return None;
            }
            1usize << set.dim()
        }
        SetDescriptor::Ball1 { dim, .. } => 2 * dim,
        SetDescriptor::Simplex { dim } => *dim,
        SetDescriptor::Singleton { .. } => 1,
    };
    if count > MAX_ENUMERATED_VERTICES {
        return None;
    }
    set.to_polytope().ok()
}

/// Draws a direction whose vertex values are pairwise separated, if possible.
fn separated_direction<R: Rng>(rng: &mut R, polytope: &Polytope) -> Option<Vector> {
    let vertices = polytope.vertices();
    for _ in 0..100 {
        let x = random_direction(rng, polytope.dim());
        let mut values: Vec<(f64, &Vector)> = vertices.iter().map(|v| (v.dot(&x), v)).collect();
        values.sort_by(|a, b| a.0.total_cmp(&b.0));
        let separated = values
            .windows(2)
            .all(|w| w[0].1 == w[1].1 || w[1].0 - w[0].0 >= MIN_PRODUCT_SEPARATION);
        if separated {
            return Some(x);
        }
    }
    None
}

/// The individual randomized properties.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Check {
    /// `max_c <x - p, c - p> <= tol` for `p = proj(x)`.
    ProjectionOptimality,
    /// `<lmo(x), x>` equals the support-function minimum.
    LmoOptimality,
    Idempotence,
    Nonexpansive,
    /// Projection, LMO and approximate-LMO outputs lie in the set.
    Membership,
    /// `proj(x)` is an exact LMO point for `proj(x) - x`.
    ProjLmoIdentity,
    /// `gap(proj(-lambda x), x) >= 0`.
    GapLower,
    /// `gap <= ||p|| (||v|| - ||p||) / lambda`.
    GapUpper,
    /// `||proj(-lambda x)|| <= ||lmo(x)||`.
    NormDomination,
    /// As above, against every point of the minimizing face of a polytope.
    FaceNormDomination,
    /// `gap <= eps` once `lambda = min{diam * bound, bound^2} / eps`.
    EpsilonGuarantee,
    /// Gap through the LMO equals gap through vertex enumeration.
    VertexEnumeration,
    /// Doubling search certifies exactness and lands on the minimum-norm face point.
    LambdaStar,
    /// Wolfe projection agrees with closed-form projection on simplices and boxes.
    MnpCrossCheck,
}

impl Check {
    pub const ALL: [Check; 14] = [
        Check::ProjectionOptimality,
        Check::LmoOptimality,
        Check::Idempotence,
        Check::Nonexpansive,
        Check::Membership,
        Check::ProjLmoIdentity,
        Check::GapLower,
        Check::GapUpper,
        Check::NormDomination,
        Check::FaceNormDomination,
        Check::EpsilonGuarantee,
        Check::VertexEnumeration,
        Check::LambdaStar,
        Check::MnpCrossCheck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::ProjectionOptimality => "projection-optimality",
            Check::LmoOptimality => "lmo-optimality",
            Check::Idempotence => "idempotence",
            Check::Nonexpansive => "nonexpansive",
            Check::Membership => "membership",
            Check::ProjLmoIdentity => "projlmo-identity",
            Check::GapLower => "gap-lower",
            Check::GapUpper => "gap-upper",
            Check::NormDomination => "norm-domination",
            Check::FaceNormDomination => "face-norm-domination",
            Check::EpsilonGuarantee => "epsilon-guarantee",
            Check::VertexEnumeration => "vertex-enumeration",
            Check::LambdaStar => "lambda-star",
            Check::MnpCrossCheck => "mnp-cross-check",
        }
    }

    fn salt(self) -> u64 {
        Check::ALL.iter().position(|c| *c == self).unwrap() as u64 + 1
    }

    /// Slack of one trial, or `None` when the check does not apply to the drawn set.
    pub fn trial<R: Rng>(self, set: &SetDescriptor, rng: &mut R) -> Result<Option<f64>> {
        let mu = set.constants().norm_bound;
        let x = random_direction(rng, set.dim());
        let tol = certificate_tolerance(x.norm(), mu);
        let slack = match self {
            Check::ProjectionOptimality => {
                let p = set.project(&x)?;
                let residual = &x - &p;
                let c = set.lmo_exact(&-&residual)?;
                residual.dot(&(&c - &p)) - tol
            }
            Check::LmoOptimality => {
                let v = set.lmo_exact(&x)?;
                (v.dot(&x) - reference_min_value(set, &x)).abs() - tol
            }
            Check::Idempotence => {
                let p = set.project(&x)?;
                let pp = set.project(&p)?;
                pp.distance(&p) - 1e-12 * (1.0 + x.norm())
            }
            Check::Nonexpansive => {
                let y = random_direction(rng, set.dim());
                let gap = set.project(&x)?.distance(&set.project(&y)?);
                gap - x.distance(&y) - 1e-12 * (1.0 + x.norm() + y.norm())
            }
            Check::Membership => {
                let member_tol = membership_tolerance(mu);
                let lambda = log_uniform(rng, 1e-3, 1e6);
                let outputs = [
                    set.project(&x)?,
                    set.lmo_exact(&x)?,
                    approx_lmo_with_lambda(set, &x, lambda)?.point,
                ];
                let mut worst = f64::NEG_INFINITY;
                for out in &outputs {
                    worst = worst.max(out.distance(&set.project(out)?) - member_tol);
                    worst = worst.max(out.norm() - mu - member_tol);
                }
                worst
            }
            Check::ProjLmoIdentity => {
                let cert = reduction::check_projlmo_identity(set, &x)?;
                let tol = certificate_tolerance(cert.direction.norm().max(x.norm()), mu);
                cert.gap.unwrap_or(f64::INFINITY) - tol
            }
            Check::GapLower | Check::GapUpper | Check::NormDomination => {
                let lambda = log_uniform(rng, 1e-3, 1e6);
                let p = set.project(&x.scaled(-lambda)?)?;
                let v = set.lmo_exact(&x)?;
                let raw_gap = p.dot(&x) - v.dot(&x);
                match self {
                    Check::GapLower => -raw_gap - tol,
                    Check::GapUpper => {
                        let bound = p.norm() * (v.norm() - p.norm()) / lambda;
                        raw_gap - bound - tol
                    }
                    _ => p.norm() - v.norm() - tol,
                }
            }
            Check::FaceNormDomination => {
                let Some(polytope) = enumerable_vertices(set) else {
                    return Ok(None);
                };
                let lambda = log_uniform(rng, 1e-3, 1e6);
                let p = set.project(&x.scaled(-lambda)?)?;
                let face = polytope.argmin_face(&x, tol);
                let options = MnpOptions::for_problem(set.dim(), face.len());
                let shortest = mnp::min_norm_point(&face, &options)?.point;
                p.norm() - shortest.norm() - tol
            }
            Check::EpsilonGuarantee => {
                let epsilon = log_uniform(rng, 1e-6, 1.0);
                let result = approx_lmo(set, &x, epsilon)?;
                let raw_gap = result.point.dot(&x) - set.lmo_exact(&x)?.dot(&x);
                raw_gap - epsilon - tol
            }
            Check::VertexEnumeration => {
                let SetDescriptor::Polytope(polytope) = set else {
                    return Ok(None);
                };
                let lambda = log_uniform(rng, 1e-3, 1e6);
                let p = set.project(&x.scaled(-lambda)?)?;
                let via_lmo = p.dot(&x) - set.lmo_exact(&x)?.dot(&x);
                let brute = polytope
                    .vertices()
                    .iter()
                    .map(|v| p.dot(&x) - v.dot(&x))
                    .fold(f64::NEG_INFINITY, f64::max);
                if via_lmo == brute {
                    -1.0
                } else {
                    (via_lmo - brute).abs()
                }
            }
            Check::LambdaStar => {
                let Some(polytope) = enumerable_vertices(set) else {
                    return Ok(None);
                };
                let Some(x) = separated_direction(rng, &polytope) else {
                    return Ok(None);
                };
                let tol_exact = reduction::default_tol_exact(&x, &set.constants());
                let r = reduction::lambda_star_search(
                    &polytope,
                    &x,
                    tol_exact,
                    1.0,
                    reduction::DEFAULT_MAX_DOUBLINGS,
                )?;
                if r.converged {
                    r.min_norm_distance - MIN_NORM_MATCH_TOL
                } else {
                    f64::INFINITY
                }
            }
            Check::MnpCrossCheck => {
                let candidate = match set {
                    SetDescriptor::Simplex { .. }
                    | SetDescriptor::Box { .. }
                    | SetDescriptor::BallInf { .. }
                    | SetDescriptor::Ball1 { .. } => enumerable_vertices(set),
                    _ => None,
                };
                let Some(polytope) = candidate else {
                    return Ok(None);
                };
                let options = MnpOptions::for_problem(set.dim(), polytope.vertices().len());
                let via_mnp = mnp::mnp_project(polytope.vertices(), &x, &options)?.point;
                via_mnp.distance(&set.project(&x)?) - 1e-8
            }
        };
        Ok(Some(slack))
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Aggregated outcome of one check over many trials.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub check: Check,
    pub passed: u64,
    pub failed: u64,
    pub skipped: u64,
    /// Largest slack seen; `<= 0` when every trial passed.
    pub worst_slack: f64,
    /// First failing trial and its reason.
    pub first_failure: Option<(u64, String)>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }

    pub fn total(&self) -> u64 {
        self.passed + self.failed
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<22} {} {:>6}/{:<6} skipped={:<6} worst_slack={:+.3e}",
            self.check.name(),
            if self.all_passed() { "PASS" } else { "FAIL" },
            self.passed,
            self.total(),
            self.skipped,
            self.worst_slack,
        )?;
        if let Some((trial, why)) = &self.first_failure {
            write!(f, " first_failure=trial {trial}: {why}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuiteConfig {
    pub seed: u64,
    pub trials: u64,
    pub execution: Execution,
}

/// Runs `check` over `config.trials` seeded trials.
pub fn run_check(check: Check, source: &SetSource, config: &SuiteConfig) -> SuiteReport {
    let outcomes = config.execution.map_trials(config.trials, |trial| {
        let mut rng = trial_rng(config.seed, check.salt(), trial);
        let set = source.draw(&mut rng);
        check
            .trial(&set, &mut rng)
            .map_err(|e| format!("{} on {set}", e))
    });
    let mut report = SuiteReport {
        check,
        passed: 0,
        failed: 0,
        skipped: 0,
        worst_slack: f64::NEG_INFINITY,
        first_failure: None,
    };
    for (trial, outcome) in outcomes.into_iter().enumerate() {
        let failure = match outcome {
            Ok(None) => {
                report.skipped += 1;
                continue;
            }
            Ok(Some(slack)) => {
                report.worst_slack = report.worst_slack.max(slack);
                if slack <= 0.0 {
                    report.passed += 1;
                    continue;
                }
                format!("slack {slack:+.3e}")
            }
            Err(why) => {
                report.worst_slack = f64::INFINITY;
                why
            }
        };
        report.failed += 1;
        if report.first_failure.is_none() {
            report.first_failure = Some((trial as u64, failure));
        }
    }
    report
}

/// Runs every check against `source`.
pub fn run_all(source: &SetSource, config: &SuiteConfig) -> Vec<SuiteReport> {
    Check::ALL
        .iter()
        .map(|check| run_check(*check, source, config))
        .collect()
}

/// Errors for configurations that cannot run.
pub fn validate_config(config: &SuiteConfig) -> Result<()> {
    if config.trials == 0 {
        return Err(OracleError::InvalidParameter(
            "trials must be at least 1".into(),
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(trials: u64) -> SuiteConfig {
        SuiteConfig {
            seed: 11,
            trials,
            execution: Execution::default(),
        }
    }

    #[test]
    fn random_sets_are_valid() {
        let mut rng = trial_rng(1, 1, 0);
        for kind in SetKind::ALL {
            for _ in 0..50 {
                let set = random_set(&mut rng, kind, MAX_RANDOM_DIM);
                assert_eq!(set.kind(), kind.name());
                assert!(set.validate().is_ok());
            }
        }
    }

    #[test]
    fn reference_values_match_lmo_on_examples() {
        let set = SetDescriptor::ball1(3, 2.0).unwrap();
        let x = Vector::new(vec![1.0, -3.0, 2.0]).unwrap();
        assert_eq!(reference_min_value(&set, &x), -6.0);
        let set = SetDescriptor::ball_inf(3, 2.0).unwrap();
        assert_eq!(reference_min_value(&set, &x), -12.0);
    }

    #[test]
    fn every_check_passes_on_every_kind() {
        for kind in SetKind::ALL {
            for report in run_all(&SetSource::Random(kind), &config(60)) {
                assert!(report.all_passed(), "{kind:?}: {report}");
            }
        }
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let source = SetSource::AnyKind;
        let seq = SuiteConfig {
            execution: Execution::Sequential,
            ..config(200)
        };
        let par = SuiteConfig {
            execution: Execution::Parallel,
            ..config(200)
        };
        assert_eq!(run_all(&source, &seq), run_all(&source, &par));
    }

    #[test]
    fn fixed_source_counts_trials() {
        let set = SetDescriptor::ball2(Vector::new(vec![0.0]).unwrap(), 1.0).unwrap();
        let report = run_check(Check::ProjLmoIdentity, &SetSource::Fixed(set), &config(10));
        assert!(report.all_passed());
        assert_eq!(report.total(), 10);
        assert!(validate_config(&config(0)).is_err());
    }
}
