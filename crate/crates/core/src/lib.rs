//! Exact theory, Monte Carlo engine and statistical verifiers for the
//! elephant random walk with two memory channels.
//!
//! The crate is split into three layers:
//!
//! * [`theory`] evaluates the closed-form constants of the walk: drift zeros,
//!   their linearisation, phase thresholds, ballistic speed, CLT variances and
//!   fluctuation exponents.
//! * [`engine`] simulates the walk (and the classical single-channel walk and
//!   the three-colour urn) with constant memory per replica and reproducible
//!   per-replica random streams.
//! * [`stats`] confronts simulated ensembles with the theory values and hosts
//!   the deterministic oracles (ODE flow, Newton root finding).

pub mod engine;
pub mod stats;
pub mod theory;

pub use theory::{Branch, MemoryParam, Regime, SimplexPoint, TheoryError};
