//! Direct quadrature of the limit variance integral, an independent check of
//! the Lyapunov route used by the theory layer.

use super::StatsError;
use crate::theory::linalg::{self, Mat2, Vec2};
use crate::theory::{gamma_p, jacobian, noise_cov, Branch, MemoryParam, SimplexPoint, POSITION_DIRECTION};

/// `e^{tA}` for a 2×2 matrix with real eigenvalues.
pub fn expm2(a: &Mat2, t: f64) -> Mat2 {
    let mu = 0.5 * (a[0][0] + a[1][1]);
    let half_diff = 0.5 * (a[0][0] - a[1][1]);
    let disc = (half_diff * half_diff + a[0][1] * a[1][0]).max(0.0);
    let d = disc.sqrt();
    // cosh(td) and sinh(td)/d, scaled by e^{tμ}, without overflow
    let (c, s) = if d * t < 1e-8 {
        let e = (t * mu).exp();
        (e, e * t)
    } else {
        let (ep, em) = ((t * (mu + d)).exp(), (t * (mu - d)).exp());
        (0.5 * (ep + em), 0.5 * (ep - em) / d)
    };
    let m = linalg::shift(a, -mu);
    [
        [c + s * m[0][0], s * m[0][1]],
        [s * m[1][0], c + s * m[1][1]],
    ]
}

fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, eps: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * eps {
        return left + right + delta / 15.0;
    }
    simpson(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1)
        + simpson(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1)
}

/// Adaptive Simpson on `[a, b]` to absolute tolerance `eps`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, eps: f64) -> f64 {
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson(&f, a, b, fa, fm, fb, whole, eps, 50)
}

/// `∫₀^∞ dᵀ e^{tA} σ(γ) e^{tAᵀ} d dt` with `A = J(γ) + I/2`, truncated where
/// the integrand drops below `1e-14`.
pub fn lyapunov_integral(p: MemoryParam, gamma: &SimplexPoint, direction: Vec2) -> Result<f64, StatsError> {
    let a = linalg::shift(&jacobian(p, gamma), 0.5);
    let (l1, _) = linalg::eigenvalues(&a)?;
    if l1 >= -1e-9 {
        return Err(crate::theory::TheoryError::NotHurwitz(l1).into());
    }
    let sigma = noise_cov(gamma).0;
    let f = |t: f64| {
        let v = linalg::mat_vec(&linalg::transpose(&expm2(&a, t)), direction);
        linalg::quad_form(&sigma, v)
    };
    let mut t_end = 1.0;
    while f(t_end).abs() >= 1e-14 || f(0.5 * t_end).abs() >= 1e-14 {
        t_end *= 2.0;
        if t_end > 1e9 {
            return Err(StatsError::Degenerate("integrand does not decay".into()));
        }
    }
    // Unit-length pieces keep the local error control meaningful.
    let pieces = (t_end.ceil() as usize).clamp(1, 1 << 16);
    let h = t_end / pieces as f64;
    Ok((0..pieces)
        .map(|k| adaptive_simpson(&f, k as f64 * h, (k + 1) as f64 * h, 1e-15))
        .sum())
}

/// Quadrature value of the diffusive variance constant above `p₃` at one
/// branch.
pub fn sigma1_quadrature(p: MemoryParam, branch: Branch) -> Result<f64, StatsError> {
    let g = gamma_p(p)?;
    let g = match branch {
        Branch::Upper => g,
        Branch::Lower => g.swapped(),
    };
    lyapunov_integral(p, &g, POSITION_DIRECTION)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theory::{p3, sigma1};

    #[test]
    fn expm_of_diagonal_and_nilpotent() {
        let e = expm2(&[[-1.0, 0.0], [0.0, -2.0]], 0.7);
        assert!((e[0][0] - (-0.7f64).exp()).abs() < 1e-15);
        assert!((e[1][1] - (-1.4f64).exp()).abs() < 1e-15);
        let n = expm2(&[[0.0, 1.0], [0.0, 0.0]], 3.0);
        assert_eq!(n, [[1.0, 3.0], [0.0, 1.0]]);
    }

    #[test]
    fn simpson_exact_on_cubic() {
        let v = adaptive_simpson(|t| t * t * t - t, 0.0, 2.0, 1e-14);
        assert!((v - 2.0).abs() < 1e-13);
    }

    #[test]
    fn diffusive_integral_matches_closed_form() {
        let p = MemoryParam::new(0.6).unwrap();
        let v = lyapunov_integral(p, &SimplexPoint::GAMMA0, POSITION_DIRECTION).unwrap();
        assert!((v - 10.0 / 7.0).abs() < 1e-9);
    }

    #[test]
    fn agrees_with_lyapunov_above_upper_threshold() {
        for p in [0.97, p3() + 0.01, 0.995] {
            let p = MemoryParam::new(p).unwrap();
            for b in Branch::BOTH {
                let q = sigma1_quadrature(p, b).unwrap();
                let l = sigma1(p, Some(b)).unwrap();
                assert!((q - l).abs() < 1e-8, "p={p} {b:?}: {q} vs {l}");
            }
        }
    }
}
