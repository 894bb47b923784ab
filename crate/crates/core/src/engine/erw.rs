//! Classical single-channel elephant random walk.

use rand_core::RngCore;
use serde::{Deserialize, Serialize};

use super::rng::{rademacher, uniform};
use crate::theory::MemoryParam;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ErwState {
    pub n: u64,
    pub n_plus: u64,
}

impl ErwState {
    pub fn n_minus(&self) -> u64 {
        self.n - self.n_plus
    }

    pub fn position(&self) -> i64 {
        2 * self.n_plus as i64 - self.n as i64
    }
}

/// First step `+1` with probability `q`.
pub fn erw_init<R: RngCore + ?Sized>(q: f64, rng: &mut R) -> ErwState {
    ErwState {
        n: 1,
        n_plus: u64::from(rademacher(rng, q) > 0),
    }
}

/// Probability that the next step is `+1`: a uniformly chosen past step is
/// copied with probability `p` and flipped otherwise.
#[inline]
pub fn erw_plus_probability(p: f64, s: &ErwState) -> f64 {
    (1.0 - p) + (2.0 * p - 1.0) * (s.n_plus as f64 / s.n as f64)
}

#[inline]
pub fn erw_step<R: RngCore + ?Sized>(p: MemoryParam, s: ErwState, rng: &mut R) -> ErwState {
    let up = uniform(rng) < erw_plus_probability(p.value(), &s);
    ErwState {
        n: s.n + 1,
        n_plus: s.n_plus + u64::from(up),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::rng::SeedSpec;

    #[test]
    fn sure_first_step_then_copy() {
        let s = erw_init(1.0, &mut SeedSpec::new(0).replica_rng(0));
        assert_eq!(s, ErwState { n: 1, n_plus: 1 });
        assert!((erw_plus_probability(0.7, &s) - 0.7).abs() < 1e-15);
    }

    #[test]
    fn half_memory_forgets() {
        let s = ErwState { n: 10, n_plus: 9 };
        assert_eq!(erw_plus_probability(0.5, &s), 0.5);
    }

    #[test]
    fn second_step_frequency() {
        let p = MemoryParam::new(0.8).unwrap();
        let mut rng = SeedSpec::new(4).replica_rng(0);
        let trials = 200_000;
        let ups = (0..trials)
            .filter(|_| erw_step(p, erw_init(1.0, &mut rng), &mut rng).n_plus == 2)
            .count();
        let f = ups as f64 / trials as f64;
        assert!((f - 0.8).abs() < 4.0 * (0.16f64 / trials as f64).sqrt());
    }
}
