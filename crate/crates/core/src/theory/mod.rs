//! Closed-form and small dense numerics for the two-channel walk.
//!
//! Everything here is a pure function of its arguments. The drift of the
//! stochastic-approximation state `Γ_n = (n₊/n, n₋/n)` is the quadratic field
//!
//! ```text
//! h_p(x) = ( ((1-p)x₁ + p x₂ - 1)² - (1 - x₁ - x₂)² - x₁ ,
//!            ((1-p)x₂ + p x₁ - 1)² - (1 - x₁ - x₂)² - x₂ )
//! ```
//!
//! and all limit constants of the walk are read off its zeros.

mod constants;
mod drift;
mod fixed_points;
pub mod linalg;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use constants::{
    alpha_beta, branch_decomposition, conjectured_variance_exponent, exponent_y,
    lyapunov_variance, sigma1, sigma1_branches, sigma2, sigma2_branches,
    sigma2_from_left_eigenvector, speed_c, AsymptoticConstants, BranchPair, POSITION_DIRECTION,
};
pub use drift::{drift, drift_at, jacobian, jacobian_at, noise_cov, NoiseCovariance, SimplexPoint};
pub use fixed_points::{
    eigen_at, fixed_points, gamma_p, EigenData, FixedPointReport, FixedPoints, Stability, ZeroKind,
};
pub use linalg::{Mat2, Vec2};

/// Lower critical point, diffusive → superdiffusive.
pub const P1: f64 = 11.0 / 16.0;
/// Superdiffusive → ballistic. The walk itself is not classified here.
pub const P2: f64 = 7.0 / 8.0;

/// Upper critical point `(113 + √97) / 128`, where the leading eigenvalue at
/// the ballistic zero crosses `-1/2`.
pub fn p3() -> f64 {
    (113.0 + 97f64.sqrt()) / 128.0
}

/// Tolerance used to recognise the irrational threshold.
pub const P3_MATCH_TOL: f64 = 1e-15;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TheoryError {
    #[error("memory parameter must lie in the open interval (0, 1), got {0}")]
    InvalidParameter(f64),
    #[error("p = 7/8 is an open case: no limit constants are available")]
    OpenCase,
    #[error("{quantity} is not defined for p = {p} (regime {regime})")]
    Regime {
        quantity: &'static str,
        p: f64,
        regime: Regime,
    },
    #[error("point ({x1}, {x2}) is not a zero of the drift (|h| = {norm:e})")]
    NotAZero { x1: f64, x2: f64, norm: f64 },
    #[error("point ({0}, {1}) lies outside the simplex")]
    OutsideSimplex(f64, f64),
    #[error("Jacobian has complex eigenvalues (discriminant {0:e})")]
    ComplexEigenvalues(f64),
    #[error("Lyapunov operator is not Hurwitz: eigenvalue {0} of J + I/2 is not below -1e-9")]
    NotHurwitz(f64),
    #[error("singular linear system")]
    Singular,
    #[error("closed form disagrees with numerical value for {what}: {closed} vs {numeric}")]
    ClosedFormMismatch {
        what: &'static str,
        closed: f64,
        numeric: f64,
    },
}

pub type Result<T, E = TheoryError> = std::result::Result<T, E>;

/// Memory parameter `p ∈ (0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct MemoryParam(f64);

impl MemoryParam {
    pub fn new(p: f64) -> Result<Self> {
        if p.is_finite() && p > 0.0 && p < 1.0 {
            Ok(Self(p))
        } else {
            Err(TheoryError::InvalidParameter(p))
        }
    }

    /// The exact threshold constants, for callers that want critical behaviour.
    pub fn p1() -> Self {
        Self(P1)
    }

    pub fn p2() -> Self {
        Self(P2)
    }

    pub fn p3() -> Self {
        Self(p3())
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn regime(self) -> Regime {
        regime_classify(self)
    }

    pub fn is_p1(self) -> bool {
        self.0 == P1
    }

    pub fn is_p2(self) -> bool {
        self.0 == P2
    }

    pub fn is_p3(self) -> bool {
        (self.0 - p3()).abs() < P3_MATCH_TOL
    }
}

impl TryFrom<f64> for MemoryParam {
    type Error = TheoryError;

    fn try_from(p: f64) -> Result<Self> {
        Self::new(p)
    }
}

impl From<MemoryParam> for f64 {
    fn from(p: MemoryParam) -> f64 {
        p.0
    }
}

impl fmt::Display for MemoryParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Phase of the walk as a function of `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    /// `(0, 11/16)`
    Diffusive,
    /// `p = 11/16`
    CriticalLower,
    /// `(11/16, 7/8)`
    Superdiffusive,
    /// `p = 7/8`
    OpenBoundary,
    /// `(7/8, p₃)`
    BallisticSuperdiffusiveFluct,
    /// `p = p₃`
    CriticalUpper,
    /// `(p₃, 1)`
    BallisticGaussianFluct,
}

impl Regime {
    pub const ALL: [Regime; 7] = [
        Regime::Diffusive,
        Regime::CriticalLower,
        Regime::Superdiffusive,
        Regime::OpenBoundary,
        Regime::BallisticSuperdiffusiveFluct,
        Regime::CriticalUpper,
        Regime::BallisticGaussianFluct,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Regime::Diffusive => "Diffusive",
            Regime::CriticalLower => "CriticalLower",
            Regime::Superdiffusive => "Superdiffusive",
            Regime::OpenBoundary => "OpenBoundary",
            Regime::BallisticSuperdiffusiveFluct => "BallisticSuperdiffusiveFluct",
            Regime::CriticalUpper => "CriticalUpper",
            Regime::BallisticGaussianFluct => "BallisticGaussianFluct",
        }
    }

    /// Human readable description of the `p` set covered by the label.
    pub fn interval(self) -> &'static str {
        match self {
            Regime::Diffusive => "(0, 11/16)",
            Regime::CriticalLower => "{11/16}",
            Regime::Superdiffusive => "(11/16, 7/8)",
            Regime::OpenBoundary => "{7/8}",
            Regime::BallisticSuperdiffusiveFluct => "(7/8, (113+sqrt 97)/128)",
            Regime::CriticalUpper => "{(113+sqrt 97)/128}",
            Regime::BallisticGaussianFluct => "((113+sqrt 97)/128, 1)",
        }
    }

    pub fn is_ballistic(self) -> bool {
        matches!(
            self,
            Regime::BallisticSuperdiffusiveFluct
                | Regime::CriticalUpper
                | Regime::BallisticGaussianFluct
        )
    }

    pub fn is_critical(self) -> bool {
        matches!(self, Regime::CriticalLower | Regime::CriticalUpper)
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn regime_classify(p: MemoryParam) -> Regime {
    let v = p.value();
    if p.is_p1() {
        Regime::CriticalLower
    } else if p.is_p2() {
        Regime::OpenBoundary
    } else if p.is_p3() {
        Regime::CriticalUpper
    } else if v < P1 {
        Regime::Diffusive
    } else if v < P2 {
        Regime::Superdiffusive
    } else if v < p3() {
        Regime::BallisticSuperdiffusiveFluct
    } else {
        Regime::BallisticGaussianFluct
    }
}

/// Which of the two ballistic zeros a trajectory settled on.
///
/// `Upper` is `γ_p` (more `+1` steps, `S_n/n → +c_p`); `Lower` is its
/// component swap `γ̄_p` (`S_n/n → -c_p`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    Upper,
    Lower,
}

impl Branch {
    pub const BOTH: [Branch; 2] = [Branch::Upper, Branch::Lower];

    pub fn sign(self) -> f64 {
        match self {
            Branch::Upper => 1.0,
            Branch::Lower => -1.0,
        }
    }

    pub fn from_position(s: i64) -> Option<Self> {
        match s.signum() {
            1 => Some(Branch::Upper),
            -1 => Some(Branch::Lower),
            _ => None,
        }
    }
}
