use rand_core::RngCore;
use serde::{Deserialize, Serialize};

use super::erw::{erw_init, erw_step, ErwState};
use super::urn::{urn_init, urn_step, UrnState};
use super::walk::{init_walk, step_fast, step_literal, WalkState};
use crate::theory::MemoryParam;

/// A constant-memory process indexed by a step count `n`, with an integer
/// position and a three-way count vector.
pub trait MemoryProcess: Sync {
    type State: Copy + Send;

    fn init<R: RngCore + ?Sized>(&self, rng: &mut R) -> Self::State;
    fn step<R: RngCore + ?Sized>(&self, s: Self::State, rng: &mut R) -> Self::State;
    fn time(s: &Self::State) -> u64;
    fn position(s: &Self::State) -> i64;
    /// `(+1, -1, 0)` step counts, or `(R, B, G)` for the urn.
    fn counts(s: &Self::State) -> [u64; 3];
    /// Index of the state returned by `init`.
    fn start_time(&self) -> u64;
}

/// Called once per step with `(n, position)`, starting at the initial state.
pub trait Observer {
    fn observe(&mut self, n: u64, position: i64);
}

impl<F: FnMut(u64, i64)> Observer for F {
    #[inline]
    fn observe(&mut self, n: u64, position: i64) {
        self(n, position)
    }
}

/// Observer that ignores everything.
#[derive(Debug, Default, Clone, Copy)]
pub struct Ignore;

impl Observer for Ignore {
    #[inline]
    fn observe(&mut self, _: u64, _: i64) {}
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sampler {
    /// One categorical draw per step.
    Fast,
    /// Two retrievals, two random signs, truncation.
    Literal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoChannel {
    pub p: MemoryParam,
    pub sampler: Sampler,
}

impl TwoChannel {
    pub fn new(p: MemoryParam) -> Self {
        Self {
            p,
            sampler: Sampler::Fast,
        }
    }
}

impl MemoryProcess for TwoChannel {
    type State = WalkState;

    fn init<R: RngCore + ?Sized>(&self, rng: &mut R) -> WalkState {
        init_walk(rng)
    }

    #[inline]
    fn step<R: RngCore + ?Sized>(&self, s: WalkState, rng: &mut R) -> WalkState {
        match self.sampler {
            Sampler::Fast => step_fast(self.p, s, rng),
            Sampler::Literal => step_literal(self.p, s, rng),
        }
    }

    fn time(s: &WalkState) -> u64 {
        s.n
    }

    fn position(s: &WalkState) -> i64 {
        s.position()
    }

    fn counts(s: &WalkState) -> [u64; 3] {
        s.counts()
    }

    fn start_time(&self) -> u64 {
        2
    }
}

/// Classical walk; `q` is the probability of a first step `+1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Erw {
    pub p: MemoryParam,
    pub q: f64,
}

impl MemoryProcess for Erw {
    type State = ErwState;

    fn init<R: RngCore + ?Sized>(&self, rng: &mut R) -> ErwState {
        erw_init(self.q, rng)
    }

    #[inline]
    fn step<R: RngCore + ?Sized>(&self, s: ErwState, rng: &mut R) -> ErwState {
        erw_step(self.p, s, rng)
    }

    fn time(s: &ErwState) -> u64 {
        s.n
    }

    fn position(s: &ErwState) -> i64 {
        s.position()
    }

    fn counts(s: &ErwState) -> [u64; 3] {
        [s.n_plus, s.n_minus(), 0]
    }

    fn start_time(&self) -> u64 {
        1
    }
}

/// The urn, indexed by its ball total `R + B + G` so that index `n` lines up
/// with step `n` of the walk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Urn {
    pub p: MemoryParam,
}

impl MemoryProcess for Urn {
    type State = UrnState;

    fn init<R: RngCore + ?Sized>(&self, rng: &mut R) -> UrnState {
        urn_init(rng)
    }

    fn step<R: RngCore + ?Sized>(&self, s: UrnState, rng: &mut R) -> UrnState {
        urn_step(self.p, s, rng)
    }

    fn time(s: &UrnState) -> u64 {
        s.total()
    }

    fn position(s: &UrnState) -> i64 {
        s.imbalance()
    }

    fn counts(s: &UrnState) -> [u64; 3] {
        s.counts()
    }

    fn start_time(&self) -> u64 {
        2
    }
}
