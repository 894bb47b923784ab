use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

/// Generator used for every replica stream.
pub type StreamRng = ChaCha8Rng;

/// Name and version of the pinned generator, recorded in manifests.
pub const GENERATOR: &str = "chacha8 (rand_chacha 0.9.0), seed_from_u64 + set_stream";

/// Master seed of an ensemble.
///
/// Replica `i` draws from ChaCha8 keyed by `seed_from_u64(master_seed)` on
/// stream `i`; streams never overlap and do not depend on scheduling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedSpec {
    pub master_seed: u64,
}

impl SeedSpec {
    pub fn new(master_seed: u64) -> Self {
        Self { master_seed }
    }

    pub fn replica_rng(&self, replica: u64) -> StreamRng {
        let mut rng = StreamRng::seed_from_u64(self.master_seed);
        rng.set_stream(replica);
        rng
    }

    /// An unrelated seed for a sub-experiment, `splitmix64(master ^ label)`.
    pub fn derive(&self, label: u64) -> SeedSpec {
        SeedSpec::new(splitmix64(self.master_seed ^ label))
    }
}

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniform on `[0, 1)` with 53 random bits.
#[inline]
pub fn uniform<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// `+1` with probability `p`, `-1` otherwise.
#[inline]
pub fn rademacher<R: RngCore + ?Sized>(rng: &mut R, p: f64) -> i8 {
    if uniform(rng) < p {
        1
    } else {
        -1
    }
}

/// Uniform index in `0..n`, by Lemire's multiply-shift with rejection.
#[inline]
pub fn below<R: RngCore + ?Sized>(rng: &mut R, n: u64) -> u64 {
    debug_assert!(n > 0);
    let threshold = n.wrapping_neg() % n;
    loop {
        let m = (rng.next_u64() as u128) * (n as u128);
        if (m as u64) >= threshold {
            return (m >> 64) as u64;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let s = SeedSpec::new(7);
        let a: Vec<u64> = (0..4).map(|_| s.replica_rng(3).next_u64()).collect();
        assert!(a.windows(2).all(|w| w[0] == w[1]));
        assert_ne!(s.replica_rng(3).next_u64(), s.replica_rng(4).next_u64());
        assert_ne!(s.derive(1).master_seed, s.derive(2).master_seed);
    }

    #[test]
    fn uniform_range() {
        let mut rng = SeedSpec::new(1).replica_rng(0);
        for _ in 0..10_000 {
            let u = uniform(&mut rng);
            assert!((0.0..1.0).contains(&u));
        }
    }

    #[test]
    fn below_is_in_range_and_covers() {
        let mut rng = SeedSpec::new(2).replica_rng(0);
        let mut seen = [0u32; 5];
        for _ in 0..5000 {
            seen[below(&mut rng, 5) as usize] += 1;
        }
        assert!(seen.iter().all(|&c| c > 850 && c < 1150), "{seen:?}");
    }

    #[test]
    fn pinned_first_output() {
        // Guards the documented stream derivation against silent changes.
        let mut a = SeedSpec::new(42).replica_rng(0);
        let mut b = StreamRng::seed_from_u64(42);
        assert_eq!(a.next_u64(), b.next_u64());
    }
}
