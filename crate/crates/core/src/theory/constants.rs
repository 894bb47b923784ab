use serde::{Deserialize, Serialize};

use super::drift::{jacobian, noise_cov, SimplexPoint};
use super::fixed_points::{eigen_at, gamma_p};
use super::linalg::{self, quad_form, Vec2};
use super::{Branch, MemoryParam, Regime, Result, TheoryError, P2};

/// `S_n/n - Λ_p = uᵀ(Γ_n - Γ)` with this `u`.
pub const POSITION_DIRECTION: Vec2 = [1.0, -1.0];

fn regime_error(quantity: &'static str, p: MemoryParam) -> TheoryError {
    TheoryError::Regime {
        quantity,
        p: p.value(),
        regime: p.regime(),
    }
}

fn branch_point(p: MemoryParam, branch: Branch) -> Result<SimplexPoint> {
    let g = gamma_p(p)?;
    Ok(match branch {
        Branch::Upper => g,
        Branch::Lower => g.swapped(),
    })
}

/// Ballistic speed: `|lim S_n/n|`.
pub fn speed_c(p: MemoryParam) -> Result<f64> {
    let v = p.value();
    if p.is_p2() {
        Err(TheoryError::OpenCase)
    } else if v < P2 {
        Ok(0.0)
    } else {
        let d = 32.0 * v * v - 52.0 * v + 21.0;
        Ok(d.sqrt() / (2.0 * v - 1.0).powi(2))
    }
}

/// `dᵀ M d` where `M = ∫₀^∞ e^{tA} σ(γ) e^{tAᵀ} dt`, `A = J(γ) + I/2`,
/// obtained from the Lyapunov equation `A M + M Aᵀ = -σ(γ)`.
pub fn lyapunov_variance(p: MemoryParam, gamma: &SimplexPoint, direction: Vec2) -> Result<f64> {
    let a = linalg::shift(&jacobian(p, gamma), 0.5);
    let m = linalg::lyapunov(&a, noise_cov(gamma).matrix())?;
    Ok(quad_form(&m, direction))
}

/// Limit variance of `√n (S_n/n - Λ_p)`.
///
/// `branch` selects the ballistic zero for `p > p₃` (default: upper); it is
/// ignored in the diffusive regime.
pub fn sigma1(p: MemoryParam, branch: Option<Branch>) -> Result<f64> {
    match p.regime() {
        Regime::Diffusive => Ok(2.0 / (11.0 - 16.0 * p.value())),
        Regime::BallisticGaussianFluct => {
            let g = branch_point(p, branch.unwrap_or(Branch::Upper))?;
            lyapunov_variance(p, &g, POSITION_DIRECTION)
        }
        _ => Err(regime_error("sigma1", p)),
    }
}

/// Coefficients `(c₁, c₂)` with `c₁ν⁽¹⁾ + c₂ν⁽²⁾ = (1, -1)` for the
/// eigenvectors at the selected ballistic zero. `c₁ + c₂ = 1` because both
/// eigenvectors have first component 1.
pub fn branch_decomposition(p: MemoryParam, branch: Branch) -> Result<(f64, f64)> {
    if p.value() <= P2 {
        return Err(regime_error("eigen decomposition of (1,-1)", p));
    }
    let g = branch_point(p, branch)?;
    let e = eigen_at(p, &g)?;
    let [v1, v2] = e.vectors;
    let basis = [[v1[0], v2[0]], [v1[1], v2[1]]];
    let c = linalg::solve(&basis, POSITION_DIRECTION)?;
    Ok((c[0], c[1]))
}

/// Closed-form decomposition weights `(α, β = 1 - α)` for `p > 7/8`.
///
/// These reconstruct `(1, -1)` from the eigenvectors at the lower zero
/// `γ̄_p`; at `γ_p` the eigenvectors are swapped and the weights differ, see
/// [`branch_decomposition`].
pub fn alpha_beta(p: MemoryParam) -> Result<(f64, f64)> {
    let v = p.value();
    if v <= P2 {
        return Err(regime_error("alpha/beta", p));
    }
    let d = (32.0 * v * v - 52.0 * v + 21.0).sqrt();
    let q = (-64.0 * v * v * v + 161.0 * v * v - 134.0 * v + 37.0).sqrt();
    let alpha = -(4.0 - 5.0 * v + (2.0 * v - 1.0) * d - q) / (2.0 * q);
    Ok((alpha, 1.0 - alpha))
}

/// Limit variance of `√(n / ln n) (S_n/n - Λ_p)` at the two critical points.
pub fn sigma2(p: MemoryParam, branch: Option<Branch>) -> Result<f64> {
    if p.is_p1() {
        return Ok(2.0 / 3.0);
    }
    if !p.is_p3() {
        return Err(regime_error("sigma2", p));
    }
    let branch = branch.unwrap_or(Branch::Upper);
    let g = branch_point(p, branch)?;
    let e = eigen_at(p, &g)?;
    let (c1, _) = branch_decomposition(p, branch)?;
    Ok(c1 * c1 * quad_form(noise_cov(&g).matrix(), e.vectors[0]))
}

/// Same quantity as [`sigma2`] at `p₃`, assembled from the left eigenvector:
/// the `ν⁽¹⁾` component of `u` is `(wᵀu / wᵀν⁽¹⁾) ν⁽¹⁾` with `wᵀJ = λ⁽¹⁾wᵀ`.
pub fn sigma2_from_left_eigenvector(p: MemoryParam, branch: Branch) -> Result<f64> {
    if !p.is_p3() {
        return Err(regime_error("sigma2", p));
    }
    let g = branch_point(p, branch)?;
    let j = jacobian(p, &g);
    let jt = linalg::transpose(&j);
    let (l1, _) = linalg::eigenvalues(&jt)?;
    let w = linalg::eigenvector(&jt, l1).ok_or(TheoryError::Singular)?;
    let (n1, _) = linalg::eigenvalues(&j)?;
    let nu = linalg::eigenvector(&j, n1).ok_or(TheoryError::Singular)?;
    let coef = linalg::dot(w, POSITION_DIRECTION) / linalg::dot(w, nu);
    Ok(coef * coef * quad_form(noise_cov(&g).matrix(), nu))
}

/// A quantity evaluated on both ballistic branches.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchPair {
    pub upper: f64,
    pub lower: f64,
    /// `|upper - lower| < 1e-10`
    pub coincide: bool,
}

impl BranchPair {
    fn new(upper: f64, lower: f64) -> Self {
        Self {
            upper,
            lower,
            coincide: (upper - lower).abs() < 1e-10,
        }
    }

    pub fn get(&self, branch: Branch) -> f64 {
        match branch {
            Branch::Upper => self.upper,
            Branch::Lower => self.lower,
        }
    }
}

pub fn sigma2_branches(p: MemoryParam) -> Result<BranchPair> {
    Ok(BranchPair::new(
        sigma2(p, Some(Branch::Upper))?,
        sigma2(p, Some(Branch::Lower))?,
    ))
}

pub fn sigma1_branches(p: MemoryParam) -> Result<BranchPair> {
    Ok(BranchPair::new(
        sigma1(p, Some(Branch::Upper))?,
        sigma1(p, Some(Branch::Lower))?,
    ))
}

/// Decay exponent of `S_n/n - Λ_p` where it converges almost surely after
/// rescaling by `n^{y_p}`.
pub fn exponent_y(p: MemoryParam) -> Result<f64> {
    let v = p.value();
    match p.regime() {
        Regime::Superdiffusive => Ok((7.0 - 8.0 * v) / 3.0),
        Regime::BallisticSuperdiffusiveFluct => {
            let q = -64.0 * v * v * v + 161.0 * v * v - 134.0 * v + 37.0;
            Ok((5.0 * v - 4.0 - q.sqrt()) / (2.0 * v - 1.0))
        }
        _ => Err(regime_error("y_p", p)),
    }
}

/// Growth exponent of `Var(S_n)`: `1`, `8(2p-1)/3 = 2 - 2y_p`, or `2`.
///
/// Undefined at the thresholds, where the growth carries log corrections.
pub fn conjectured_variance_exponent(p: MemoryParam) -> Result<f64> {
    match p.regime() {
        Regime::Diffusive => Ok(1.0),
        Regime::Superdiffusive => Ok(8.0 * (2.0 * p.value() - 1.0) / 3.0),
        Regime::BallisticSuperdiffusiveFluct | Regime::BallisticGaussianFluct => Ok(2.0),
        _ => Err(regime_error("variance growth exponent", p)),
    }
}

/// Every limit constant that exists at a given `p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticConstants {
    pub p: MemoryParam,
    pub regime: Regime,
    c_p: Option<f64>,
    sigma1: Option<f64>,
    sigma2: Option<f64>,
    y_p: Option<f64>,
    alpha: Option<f64>,
    beta: Option<f64>,
}

impl AsymptoticConstants {
    pub fn compute(p: MemoryParam) -> Self {
        let (alpha, beta) = match alpha_beta(p) {
            Ok((a, b)) => (Some(a), Some(b)),
            Err(_) => (None, None),
        };
        Self {
            p,
            regime: p.regime(),
            c_p: speed_c(p).ok(),
            sigma1: sigma1(p, None).ok(),
            sigma2: sigma2(p, None).ok(),
            y_p: exponent_y(p).ok(),
            alpha,
            beta,
        }
    }

    fn field(&self, v: Option<f64>, quantity: &'static str) -> Result<f64> {
        v.ok_or_else(|| {
            if self.p.is_p2() {
                TheoryError::OpenCase
            } else {
                regime_error(quantity, self.p)
            }
        })
    }

    pub fn c_p(&self) -> Result<f64> {
        self.field(self.c_p, "c_p")
    }

    pub fn sigma1(&self) -> Result<f64> {
        self.field(self.sigma1, "sigma1")
    }

    pub fn sigma2(&self) -> Result<f64> {
        self.field(self.sigma2, "sigma2")
    }

    pub fn y_p(&self) -> Result<f64> {
        self.field(self.y_p, "y_p")
    }

    pub fn alpha(&self) -> Result<f64> {
        self.field(self.alpha, "alpha")
    }

    pub fn beta(&self) -> Result<f64> {
        self.field(self.beta, "beta")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theory::{fixed_points, p3, ZeroKind, P1};

    fn mp(p: f64) -> MemoryParam {
        MemoryParam::new(p).unwrap()
    }

    #[test]
    fn speed_values() {
        assert_eq!(speed_c(mp(0.6)).unwrap(), 0.0);
        assert_eq!(speed_c(MemoryParam::p2()), Err(TheoryError::OpenCase));
        assert!((speed_c(mp(0.9)).unwrap() - 0.12f64.sqrt() / 0.64).abs() < 1e-14);
        assert!((speed_c(mp(0.9)).unwrap() - 0.54127).abs() < 1e-5);
        assert!((speed_c(mp(0.95)).unwrap() - 0.8553).abs() < 1e-4);
        assert!((speed_c(mp(1.0 - 1e-10)).unwrap() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn speed_continuity_and_monotonicity() {
        assert!(speed_c(mp(0.875 + 1e-4)).unwrap() < 0.05);
        let mut last = 0.0;
        for i in 1..200 {
            let c = speed_c(mp(0.875 + 0.125 * i as f64 / 200.0)).unwrap();
            assert!(c > last);
            last = c;
        }
    }

    #[test]
    fn speed_is_gamma_gap() {
        for p in [0.88, 0.9, 0.95, 0.99] {
            let g = gamma_p(mp(p)).unwrap();
            assert!((g.x1 - g.x2 - speed_c(mp(p)).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn sigma1_closed_form() {
        assert!((sigma1(mp(0.5), None).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!((sigma1(mp(0.6), None).unwrap() - 10.0 / 7.0).abs() < 1e-14);
        assert!(sigma1(mp(0.8), None).is_err());
        assert!(sigma1(MemoryParam::p3(), None).is_err());
    }

    #[test]
    fn sigma1_diffusive_agrees_with_lyapunov_route() {
        for p in [0.1, 0.3, 0.5, 0.6, 0.68] {
            let v = lyapunov_variance(mp(p), &SimplexPoint::GAMMA0, POSITION_DIRECTION).unwrap();
            assert!((v - 2.0 / (11.0 - 16.0 * p)).abs() < 1e-12, "p={p}");
        }
    }

    #[test]
    fn sigma1_branches_coincide() {
        let b = sigma1_branches(mp(0.97)).unwrap();
        assert!(b.coincide, "{b:?}");
    }

    #[test]
    fn sigma2_values() {
        assert_eq!(sigma2(MemoryParam::p1(), None).unwrap(), 2.0 / 3.0);
        assert!(sigma2(mp(0.7), None).is_err());
        let pair = sigma2_branches(MemoryParam::p3()).unwrap();
        assert!(pair.coincide, "{pair:?}");
        for b in Branch::BOTH {
            let left = sigma2_from_left_eigenvector(MemoryParam::p3(), b).unwrap();
            assert!((left - pair.get(b)).abs() < 1e-12);
        }
    }

    #[test]
    fn y_values() {
        assert!((exponent_y(mp(0.8)).unwrap() - 0.2).abs() < 1e-15);
        // cubic at 0.9 is 0.154
        let y = exponent_y(mp(0.9)).unwrap();
        assert!((y - (0.5 - 0.154f64.sqrt()) / 0.8).abs() < 1e-12);
        assert!((y - 0.134_465).abs() < 1e-6);
        assert!((exponent_y(mp(P1 + 1e-4)).unwrap() - 0.5).abs() < 1e-3);
        assert!((exponent_y(mp(p3() - 1e-4)).unwrap() - 0.5).abs() < 1e-3);
        assert!(exponent_y(mp(0.875 - 1e-6)).unwrap() < 1e-5);
        assert!(exponent_y(mp(0.875 + 1e-6)).unwrap() < 1e-5);
        assert!(exponent_y(mp(0.5)).is_err());
        assert!(exponent_y(MemoryParam::p2()).is_err());
    }

    #[test]
    fn conjectured_exponents() {
        assert_eq!(conjectured_variance_exponent(mp(0.5)).unwrap(), 1.0);
        assert!((conjectured_variance_exponent(mp(0.8)).unwrap() - 1.6).abs() < 1e-14);
        assert_eq!(conjectured_variance_exponent(mp(0.95)).unwrap(), 2.0);
        assert!(conjectured_variance_exponent(MemoryParam::p1()).is_err());
        for i in 1..50 {
            let p = mp(P1 + (0.875 - P1) * i as f64 / 50.0);
            let lhs = conjectured_variance_exponent(p).unwrap();
            assert!((lhs - (2.0 - 2.0 * exponent_y(p).unwrap())).abs() < 1e-14);
        }
    }

    #[test]
    fn alpha_beta_reconstructs_on_lower_branch() {
        for p in [0.88, 0.9, 0.95, 0.97, 0.99] {
            let p = mp(p);
            let (a, b) = alpha_beta(p).unwrap();
            assert_eq!(a + b, 1.0);
            let fp = fixed_points(p).unwrap();
            let [v1, v2] = fp.get(ZeroKind::Lower).unwrap().eigen.vectors;
            let r = [a * v1[0] + b * v2[0] - 1.0, a * v1[1] + b * v2[1] + 1.0];
            assert!(linalg::norm(r) < 1e-10);
            let (c1, _) = branch_decomposition(p, Branch::Lower).unwrap();
            assert!((c1 - a).abs() < 1e-10);
        }
        assert!(alpha_beta(mp(0.8)).is_err());
    }

    #[test]
    fn constants_gated_by_regime() {
        let c = AsymptoticConstants::compute(mp(0.5));
        assert!((c.sigma1().unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(c.c_p().unwrap(), 0.0);
        assert!(c.y_p().is_err());
        assert!(c.alpha().is_err());
        let open = AsymptoticConstants::compute(MemoryParam::p2());
        assert_eq!(open.c_p(), Err(TheoryError::OpenCase));
        let b = AsymptoticConstants::compute(mp(0.9));
        assert_eq!(b.alpha().unwrap() + b.beta().unwrap(), 1.0);
        assert!(b.sigma1().is_err());
    }
}
