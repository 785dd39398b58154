//! Frank-Wolfe on `1/2 ||z - target||^2` driven by the projection-based LMO.

use serde::Serialize;

use crate::error::{OracleError, Result};
use crate::reduction::approx_lmo;
use crate::sets::{ConvexSetOracle, SetDescriptor};
use crate::vector::Vector;

/// Accuracy requested from the linear minimization step at iteration `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum EpsilonSchedule {
    /// Exact LMO at every iteration.
    Exact,
    Constant(f64),
    /// `c / (k + 2)`.
    Harmonic(f64),
}

impl EpsilonSchedule {
    pub fn epsilon(&self, k: usize) -> f64 {
        match *self {
            Self::Exact => 0.0,
            Self::Constant(c) => c,
            Self::Harmonic(c) => c / (k as f64 + 2.0),
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Self::Exact => Ok(()),
            Self::Constant(c) | Self::Harmonic(c) if c > 0.0 && c.is_finite() => Ok(()),
            Self::Constant(c) | Self::Harmonic(c) => Err(OracleError::InvalidParameter(format!(
                "epsilon schedule constant must be positive, got {c}"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FwProblem {
    pub set: SetDescriptor,
    pub target: Vector,
    pub schedule: EpsilonSchedule,
}

impl FwProblem {
    pub fn new(set: SetDescriptor, target: Vector, schedule: EpsilonSchedule) -> Result<Self> {
        set.validate()?;
        target.expect_dim(set.dim())?;
        schedule.validate()?;
        Ok(FwProblem {
            set,
            target,
            schedule,
        })
    }

    pub fn objective(&self, z: &Vector) -> f64 {
        0.5 * z.distance(&self.target).powi(2)
    }

    /// Exact or approximate minimizer of `<., direction>` at accuracy `epsilon`.
    fn oracle(&self, direction: &Vector, epsilon: f64) -> Result<Vector> {
        if epsilon == 0.0 {
            self.set.lmo_exact(direction)
        } else {
            Ok(approx_lmo(&self.set, direction, epsilon)?.point)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FwIterate {
    pub k: usize,
    pub objective: f64,
    /// `<grad, z - s>` for the oracle point `s` actually returned.
    pub fw_gap: f64,
    pub epsilon: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct FwTrace {
    pub iterates: Vec<FwIterate>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FwResult {
    pub solution: Vector,
    pub trace: FwTrace,
    /// The certified gap `fw_gap + epsilon` fell to `stop_gap`.
    pub converged: bool,
}

/// Conditional gradient with exact line search, clipped to `[0, 1]`.
///
/// Stops once `fw_gap + eps_k <= stop_gap`; since the oracle point is
/// `eps_k`-optimal this bounds the true Frank-Wolfe gap.
pub fn fw_solve(problem: &FwProblem, max_iter: usize, stop_gap: f64) -> Result<FwResult> {
    if !(stop_gap > 0.0 && stop_gap.is_finite()) {
        return Err(OracleError::InvalidParameter(format!(
            "stop_gap must be positive, got {stop_gap}"
        )));
    }
    let target = &problem.target;
    let mut z = problem.oracle(&-target, problem.schedule.epsilon(0))?;
    let mut trace = FwTrace::default();
    let mut converged = false;

    for k in 0..max_iter {
        let grad = &z - target;
        let epsilon = problem.schedule.epsilon(k);
        let s = problem.oracle(&grad, epsilon)?;
        let step = &s - &z;
        let fw_gap = -grad.dot(&step);
        trace.iterates.push(FwIterate {
            k,
            objective: problem.objective(&z),
            fw_gap,
            epsilon,
        });
        if fw_gap + epsilon <= stop_gap {
            converged = true;
            break;
        }
        let step_sq = step.norm_squared();
        if step_sq > 0.0 {
            let gamma = (fw_gap / step_sq).clamp(0.0, 1.0);
            z = &z + &(&step * gamma);
        }
    }
    Ok(FwResult {
        solution: z,
        trace,
        converged,
    })
}
