//! Estimators and verifiers that hold simulated ensembles against the
//! theory, plus deterministic oracles for the drift.
//!
//! All logarithms are natural. Tolerances are explicit arguments; the
//! defaults live next to the check that uses them.

mod equivalence;
mod fit;
mod limits;
mod ode;
mod pathwise;
mod quadrature;
mod report;
pub mod suites;

use thiserror::Error;

use crate::engine::EngineError;
use crate::theory::TheoryError;

pub use equivalence::{
    chi_square_homogeneity, sampler_counts, sampler_equivalence, sampler_test_cases, urn_embedding_test,
    ChiSquare,
};
pub use fit::{log_log_fit, mean_var, moments, variance_exponent, ExponentFit, FitWindow, Moments, MIN_FIT_POINTS};
pub use limits::{
    ballistic_check, clt_check, critical_clt_check, fluctuation_exponent, limit_stability, superdiffusive_fit, BallisticTolerance,
    BranchAssignment, CltTolerance, SuperdiffusiveTolerance,
};
pub use ode::{
    is_generic_start, newton_fixed_points, ode_integrate, ode_start_grid, OdeSample, OdeTrajectory, ODE_SLACK,
};
pub use pathwise::{
    lil_diagnostic, pathwise_run, qsl_average, returns_count, returns_diagnostic, PathAccumulator, PathSummary,
    LIL_START,
};
pub use quadrature::{adaptive_simpson, expm2, lyapunov_integral, sigma1_quadrature};
pub use report::{all_passed, Provenance, Verdict, VerificationReport};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error(transparent)]
    Theory(#[from] TheoryError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("{0}")]
    Regime(String),
    #[error("degenerate data: {0}")]
    Degenerate(String),
    #[error("a fit needs at least 4 points, got {0}")]
    TooFewPoints(usize),
    #[error("ODE trajectory left the simplex at t = {t}: ({x1}, {x2})")]
    LeftSimplex { t: f64, x1: f64, x2: f64 },
}
