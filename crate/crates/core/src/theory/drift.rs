use serde::{Deserialize, Serialize};

use super::linalg::{Mat2, Vec2};
use super::{MemoryParam, Result, TheoryError};

/// Slack allowed on the simplex constraints for points produced by floating
/// point arithmetic (closed forms, ODE states).
pub const SIMPLEX_SLACK: f64 = 1e-9;

/// `(fraction of +1 steps, fraction of -1 steps)`; the zero-step fraction is
/// `1 - x1 - x2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimplexPoint {
    pub x1: f64,
    pub x2: f64,
}

impl SimplexPoint {
    pub const ORIGIN: SimplexPoint = SimplexPoint { x1: 0.0, x2: 0.0 };
    pub const GAMMA0: SimplexPoint = SimplexPoint {
        x1: 1.0 / 3.0,
        x2: 1.0 / 3.0,
    };

    pub fn new(x1: f64, x2: f64) -> Result<Self> {
        let p = Self { x1, x2 };
        if p.in_simplex(SIMPLEX_SLACK) {
            Ok(p)
        } else {
            Err(TheoryError::OutsideSimplex(x1, x2))
        }
    }

    /// Membership in the simplex enlarged by `slack` on every constraint.
    pub fn in_simplex(&self, slack: f64) -> bool {
        self.x1.is_finite()
            && self.x2.is_finite()
            && self.x1 >= -slack
            && self.x2 >= -slack
            && self.x1 + self.x2 <= 1.0 + slack
    }

    pub fn zero_fraction(&self) -> f64 {
        1.0 - self.x1 - self.x2
    }

    /// Component swap, the image under the `+1 ↔ -1` symmetry.
    pub fn swapped(&self) -> Self {
        Self {
            x1: self.x2,
            x2: self.x1,
        }
    }

    pub fn as_vec(&self) -> Vec2 {
        [self.x1, self.x2]
    }

    pub fn distance(&self, other: &SimplexPoint) -> f64 {
        (self.x1 - other.x1).hypot(self.x2 - other.x2)
    }
}

impl From<SimplexPoint> for Vec2 {
    fn from(p: SimplexPoint) -> Vec2 {
        p.as_vec()
    }
}

pub fn drift(p: MemoryParam, x: &SimplexPoint) -> Vec2 {
    drift_at(p, x.as_vec())
}

/// The drift polynomial evaluated anywhere in the plane.
pub fn drift_at(p: MemoryParam, x: Vec2) -> Vec2 {
    let p = p.value();
    let [x1, x2] = x;
    let z = 1.0 - x1 - x2;
    let b1 = (1.0 - p) * x1 + p * x2 - 1.0;
    let b2 = (1.0 - p) * x2 + p * x1 - 1.0;
    [b1 * b1 - z * z - x1, b2 * b2 - z * z - x2]
}

pub fn jacobian(p: MemoryParam, x: &SimplexPoint) -> Mat2 {
    jacobian_at(p, x.as_vec())
}

pub fn jacobian_at(p: MemoryParam, x: Vec2) -> Mat2 {
    let p = p.value();
    let [x1, x2] = x;
    let z = 1.0 - x1 - x2;
    let b1 = (1.0 - p) * x1 + p * x2 - 1.0;
    let b2 = (1.0 - p) * x2 + p * x1 - 1.0;
    [
        [2.0 * b1 * (1.0 - p) + 2.0 * z - 1.0, 2.0 * b1 * p + 2.0 * z],
        [2.0 * b2 * p + 2.0 * z, 2.0 * b2 * (1.0 - p) + 2.0 * z - 1.0],
    ]
}

/// Limit conditional covariance of the martingale noise at a drift zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseCovariance(pub Mat2);

impl NoiseCovariance {
    pub fn matrix(&self) -> &Mat2 {
        &self.0
    }
}

/// `diag(γ) - γγᵀ`
pub fn noise_cov(gamma: &SimplexPoint) -> NoiseCovariance {
    let (g1, g2) = (gamma.x1, gamma.x2);
    NoiseCovariance([[g1 - g1 * g1, -g1 * g2], [-g1 * g2, g2 - g2 * g2]])
}
