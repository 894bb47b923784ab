use rand_core::RngCore;
use serde::{Deserialize, Serialize};

use super::rng::{below, rademacher, uniform};
use crate::theory::{MemoryParam, SimplexPoint};

/// A single step of the walk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Step {
    Plus,
    Minus,
    Zero,
}

impl Step {
    pub fn value(self) -> i64 {
        match self {
            Step::Plus => 1,
            Step::Minus => -1,
            Step::Zero => 0,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Step::Plus => 0,
            Step::Minus => 1,
            Step::Zero => 2,
        }
    }

    /// Truncation of `T ∈ {-2, …, 2}` to `{-1, 0, 1}`.
    pub fn truncate(t: i8) -> Step {
        match t.signum() {
            1 => Step::Plus,
            -1 => Step::Minus,
            _ => Step::Zero,
        }
    }
}

/// Sufficient statistic of the two-channel walk after `n ≥ 2` steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WalkState {
    pub n: u64,
    pub n_plus: u64,
    pub n_minus: u64,
}

impl WalkState {
    pub fn new(n: u64, n_plus: u64, n_minus: u64) -> Option<Self> {
        (n >= 2 && n_plus.checked_add(n_minus)? <= n).then_some(Self { n, n_plus, n_minus })
    }

    pub fn n_zero(&self) -> u64 {
        self.n - self.n_plus - self.n_minus
    }

    pub fn position(&self) -> i64 {
        self.n_plus as i64 - self.n_minus as i64
    }

    pub fn gamma(&self) -> SimplexPoint {
        let n = self.n as f64;
        SimplexPoint {
            x1: self.n_plus as f64 / n,
            x2: self.n_minus as f64 / n,
        }
    }

    pub fn counts(&self) -> [u64; 3] {
        [self.n_plus, self.n_minus, self.n_zero()]
    }

    pub fn advance(self, step: Step) -> Self {
        let mut s = self;
        s.n += 1;
        match step {
            Step::Plus => s.n_plus += 1,
            Step::Minus => s.n_minus += 1,
            Step::Zero => {}
        }
        s
    }
}

/// Law of the next step given the current counts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepDistribution {
    pub q_plus: f64,
    pub q_minus: f64,
    pub q_zero: f64,
}

impl StepDistribution {
    pub fn as_array(&self) -> [f64; 3] {
        [self.q_plus, self.q_minus, self.q_zero]
    }

    /// Inverse-CDF draw from one uniform.
    #[inline]
    pub fn sample_with(&self, u: f64) -> Step {
        if u < self.q_plus {
            Step::Plus
        } else if u < self.q_plus + self.q_minus {
            Step::Minus
        } else {
            Step::Zero
        }
    }
}

/// Step law at the point `x = (x₁, x₂)` of the simplex, i.e. `h_p(x) + x`.
///
/// A retrieved and perturbed step is `+1` with probability
/// `a = p x₁ + (1-p) x₂`, `-1` with `b = (1-p) x₁ + p x₂` and `0` with
/// `z = 1 - x₁ - x₂`; the truncated sum of two of them is `+1` with
/// probability `a² + 2az`.
#[inline]
pub fn step_distribution_at(p: f64, x1: f64, x2: f64) -> StepDistribution {
    let z = (1.0 - x1 - x2).max(0.0);
    let a = p * x1 + (1.0 - p) * x2;
    let b = (1.0 - p) * x1 + p * x2;
    let q_plus = a * (a + 2.0 * z);
    let q_minus = b * (b + 2.0 * z);
    StepDistribution {
        q_plus,
        q_minus,
        q_zero: (1.0 - q_plus - q_minus).max(0.0),
    }
}

pub fn step_distribution(p: MemoryParam, s: &WalkState) -> StepDistribution {
    let g = s.gamma();
    step_distribution_at(p.value(), g.x1, g.x2)
}

/// First two steps: independent fair signs.
pub fn init_walk<R: RngCore + ?Sized>(rng: &mut R) -> WalkState {
    let mut s = WalkState {
        n: 0,
        n_plus: 0,
        n_minus: 0,
    };
    for _ in 0..2 {
        s = s.advance(if rademacher(rng, 0.5) > 0 {
            Step::Plus
        } else {
            Step::Minus
        });
    }
    s
}

/// Value of a uniformly chosen past step.
fn retrieve<R: RngCore + ?Sized>(s: &WalkState, rng: &mut R) -> i8 {
    let k = below(rng, s.n);
    if k < s.n_plus {
        1
    } else if k < s.n_plus + s.n_minus {
        -1
    } else {
        0
    }
}

/// The model as stated: two retrievals, two `Rad(p)` signs, truncated sum.
pub fn step_literal<R: RngCore + ?Sized>(p: MemoryParam, s: WalkState, rng: &mut R) -> WalkState {
    let p = p.value();
    let x1 = rademacher(rng, p) * retrieve(&s, rng);
    let x2 = rademacher(rng, p) * retrieve(&s, rng);
    s.advance(Step::truncate(x1 + x2))
}

/// One uniform per step, drawn against [`step_distribution`].
#[inline]
pub fn step_fast<R: RngCore + ?Sized>(p: MemoryParam, s: WalkState, rng: &mut R) -> WalkState {
    let n = s.n as f64;
    let d = step_distribution_at(p.value(), s.n_plus as f64 / n, s.n_minus as f64 / n);
    s.advance(d.sample_with(uniform(rng)))
}

/// Exact conditional mean and covariance of the increment vector
/// `(1{step=+1}, 1{step=-1})`, by enumeration of the three outcomes.
pub fn increment_moments(d: &StepDistribution) -> ([f64; 2], [[f64; 2]; 2]) {
    let outcomes = [
        ([1.0, 0.0], d.q_plus),
        ([0.0, 1.0], d.q_minus),
        ([0.0, 0.0], d.q_zero),
    ];
    let mut mean = [0.0; 2];
    for (e, q) in outcomes {
        mean[0] += q * e[0];
        mean[1] += q * e[1];
    }
    let mut cov = [[0.0; 2]; 2];
    for (e, q) in outcomes {
        let c = [e[0] - mean[0], e[1] - mean[1]];
        for i in 0..2 {
            for j in 0..2 {
                cov[i][j] += q * c[i] * c[j];
            }
        }
    }
    (mean, cov)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::rng::SeedSpec;
    use crate::theory::{drift, linalg::norm};
    use proptest::prelude::*;

    fn mp(p: f64) -> MemoryParam {
        MemoryParam::new(p).unwrap()
    }

    #[test]
    fn half_memory_enumeration() {
        let d = step_distribution(mp(0.5), &WalkState::new(4, 3, 1).unwrap());
        assert!((d.q_plus - 0.25).abs() < 1e-15);
        assert!((d.q_minus - 0.25).abs() < 1e-15);
        assert!((d.q_zero - 0.5).abs() < 1e-15);
    }

    #[test]
    fn center_is_uniform() {
        let d = step_distribution(mp(0.77), &WalkState::new(9, 3, 3).unwrap());
        for q in d.as_array() {
            assert!((q - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn all_plus_row() {
        let p = 0.83;
        let d = step_distribution(mp(p), &WalkState::new(5, 5, 0).unwrap());
        assert!((d.q_plus - p * p).abs() < 1e-15);
        assert!((d.q_minus - (1.0 - p) * (1.0 - p)).abs() < 1e-15);
        assert!((d.q_zero - 2.0 * p * (1.0 - p)).abs() < 1e-15);
    }

    #[test]
    fn init_law() {
        let mut rng = SeedSpec::new(11).replica_rng(0);
        let mut hits = [0u32; 3];
        let draws = 1_000_000;
        for _ in 0..draws {
            let s = init_walk(&mut rng);
            assert_eq!((s.n, s.n_zero()), (2, 0));
            hits[(s.position() / 2 + 1) as usize] += 1;
        }
        let frac = hits.map(|h| h as f64 / draws as f64);
        assert!((frac[2] - 0.25).abs() < 0.002, "{frac:?}");
        assert!((frac[0] - 0.25).abs() < 0.002, "{frac:?}");
        assert!((frac[1] - 0.5).abs() < 0.002, "{frac:?}");
    }

    #[test]
    fn literal_reachable_states() {
        let mut rng = SeedSpec::new(3).replica_rng(0);
        let s = WalkState::new(2, 2, 0).unwrap();
        for _ in 0..1000 {
            let t = step_literal(mp(0.7), s, &mut rng);
            assert!([(3, 3, 0), (3, 2, 1), (3, 2, 0)].contains(&(t.n, t.n_plus, t.n_minus)));
        }
    }

    #[test]
    fn truncation_table() {
        assert_eq!(Step::truncate(2), Step::Plus);
        assert_eq!(Step::truncate(-2), Step::Minus);
        assert_eq!(Step::truncate(0), Step::Zero);
        assert_eq!(Step::truncate(1), Step::Plus);
    }

    #[test]
    fn fast_is_deterministic() {
        let run = || {
            let mut rng = SeedSpec::new(5).replica_rng(9);
            let mut s = init_walk(&mut rng);
            for _ in 0..10_000 {
                s = step_fast(mp(0.9), s, &mut rng);
            }
            s
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn noise_covariance_at_zeros() {
        for p in [0.3, 0.9, 0.95] {
            let p = mp(p);
            let mut points = vec![SimplexPoint::GAMMA0];
            if let Ok(g) = crate::theory::gamma_p(p) {
                points.push(g);
            }
            for g in points {
                let (mean, cov) = increment_moments(&step_distribution_at(p.value(), g.x1, g.x2));
                let sigma = crate::theory::noise_cov(&g).0;
                assert!((mean[0] - g.x1).abs() < 1e-14 && (mean[1] - g.x2).abs() < 1e-14);
                for i in 0..2 {
                    for j in 0..2 {
                        assert!((cov[i][j] - sigma[i][j]).abs() < 1e-14);
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn law_is_a_probability(p in 0.001f64..0.999, n in 2u64..10_000, a in 0.0f64..1.0, b in 0.0f64..1.0) {
            let n_plus = (a * n as f64) as u64;
            let n_minus = (b * (n - n_plus) as f64) as u64;
            let s = WalkState::new(n, n_plus, n_minus).unwrap();
            let d = step_distribution(mp(p), &s);
            let total: f64 = d.as_array().iter().sum();
            prop_assert!((total - 1.0).abs() < 1e-14);
            for q in d.as_array() {
                prop_assert!((0.0..=1.0).contains(&q));
            }
        }

        #[test]
        fn expected_increment_is_drift_plus_gamma(p in 0.001f64..0.999, n in 2u64..10_000, a in 0.0f64..1.0, b in 0.0f64..1.0) {
            let n_plus = (a * n as f64) as u64;
            let n_minus = (b * (n - n_plus) as f64) as u64;
            let s = WalkState::new(n, n_plus, n_minus).unwrap();
            let (mean, _) = increment_moments(&step_distribution(mp(p), &s));
            let g = s.gamma();
            let h = drift(mp(p), &g);
            let want = [h[0] + g.x1, h[1] + g.x2];
            prop_assert!(norm([mean[0] - want[0], mean[1] - want[1]]) < 1e-14);
        }

        #[test]
        fn steps_move_one_count(p in 0.01f64..0.99, seed in 0u64..1000) {
            let mut rng = SeedSpec::new(seed).replica_rng(0);
            let mut s = init_walk(&mut rng);
            for _ in 0..200 {
                let t = if seed % 2 == 0 { step_fast(mp(p), s, &mut rng) } else { step_literal(mp(p), s, &mut rng) };
                prop_assert_eq!(t.n, s.n + 1);
                prop_assert!(t.n_plus >= s.n_plus && t.n_minus >= s.n_minus && t.n_zero() >= s.n_zero());
                prop_assert!((t.position() - s.position()).abs() <= 1);
                prop_assert!(t.position().unsigned_abs() <= t.n);
                s = t;
            }
        }
    }
}
