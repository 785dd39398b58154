//! Linear minimization oracles built from Euclidean projections.
//!
//! For a compact convex set `C`, `proj_C(-lambda x)` is an approximate
//! minimizer of `<., x>` over `C` whose duality gap shrinks like `1/lambda`;
//! on polytopes a finite `lambda` gives an exact minimizer. This crate
//! provides exact projection and LMO oracles for a catalog of sets, the
//! projection-based approximate LMO with its gap certificates, a Wolfe
//! minimum-norm-point solver for vertex-described polytopes, a small
//! Frank-Wolfe driver and randomized property suites.

pub mod cli;
pub mod error;
pub mod exec;
pub mod fw;
pub mod mnp;
pub mod reduction;
pub mod sets;
pub mod suite;
pub mod vector;

pub use error::{OracleError, Result};
pub use exec::Execution;
pub use fw::{fw_solve, EpsilonSchedule, FwProblem, FwResult, FwTrace};
pub use mnp::{min_norm_point, mnp_project, MnpOptions, MnpResult};
pub use reduction::{
    approx_lmo, approx_lmo_with_lambda, check_projlmo_identity, choose_lambda, gap,
    lambda_star_search, ApproxLmoResult, GapCertificate, LambdaStarResult,
};
pub use sets::{ConvexSetOracle, Polytope, ProjectionOnly, SetConstants, SetDescriptor};
pub use vector::Vector;
