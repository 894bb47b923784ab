//! Step-by-step simulation with O(1) state per replica.
//!
//! The conditional law of the next step depends on the past only through the
//! counts of `+1`, `-1` and `0` steps, so a replica is three integers.
//! Retrieving a uniformly chosen past step is replaced by drawing its value
//! from the categorical law of those counts, which is the same distribution.

mod ensemble;
mod erw;
mod process;
mod rng;
mod urn;
mod walk;

use thiserror::Error;

pub use ensemble::{
    ensemble_map, ensemble_positions, ensemble_run, geometric_checkpoints, simulate,
    EnsembleCheckpoint, EnsemblePositions, Trajectory, TrajectoryPoint,
};
pub use erw::{erw_init, erw_plus_probability, erw_step, ErwState};
pub use process::{Erw, Ignore, MemoryProcess, Observer, Sampler, TwoChannel, Urn};
pub use rng::{below, rademacher, splitmix64, uniform, SeedSpec, StreamRng, GENERATOR};
pub use urn::{replacement_row, urn_init, urn_step, Color, UrnState};
pub use walk::{
    increment_moments, init_walk, step_distribution, step_distribution_at, step_fast,
    step_literal, Step, StepDistribution, WalkState,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("horizon n_max = {0} is too short; the walk starts at n = 2")]
    HorizonTooShort(u64),
    #[error("invalid checkpoints: {0}")]
    Checkpoints(String),
    #[error("at least one replica is required")]
    NoReplicas,
    #[error("cannot allocate storage for {0} replicas")]
    OutOfMemory(usize),
}
