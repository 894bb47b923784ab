use serde::{Deserialize, Serialize};

use super::drift::{drift, jacobian, SimplexPoint};
use super::linalg::{self, norm, Vec2};
use super::{MemoryParam, Result, TheoryError, P2};

/// Drift norm above which [`eigen_at`] refuses a point.
pub const ZERO_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ZeroKind {
    /// `(0, 0)`: every step is zero.
    Origin,
    /// `γ₀ = (1/3, 1/3)`
    Center,
    /// `γ_p`, first component larger.
    Upper,
    /// `γ̄_p`, the component swap of `γ_p`.
    Lower,
}

impl ZeroKind {
    pub fn label(self) -> &'static str {
        match self {
            ZeroKind::Origin => "origin",
            ZeroKind::Center => "gamma0",
            ZeroKind::Upper => "gamma_p",
            ZeroKind::Lower => "gamma_p_bar",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Stability {
    LinearlyStable,
    LinearlyUnstable,
}

/// Eigen decomposition of the Jacobian at a drift zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenData {
    /// `λ⁽¹⁾ ≥ λ⁽²⁾`
    pub values: [f64; 2],
    /// First component normalised to `+1`.
    pub vectors: [Vec2; 2],
    /// Closed-form values the numerical ones were checked against, if the
    /// point is one of the known zeros.
    pub closed_form_values: Option<[f64; 2]>,
    pub closed_form_vectors: Option<[Vec2; 2]>,
}

impl EigenData {
    pub fn residuals(&self, p: MemoryParam, at: &SimplexPoint) -> [f64; 2] {
        let j = jacobian(p, at);
        [0, 1].map(|i| {
            let v = self.vectors[i];
            norm(linalg::sub(linalg::mat_vec(&j, v), linalg::scale(v, self.values[i])))
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedPointReport {
    pub kind: ZeroKind,
    pub location: SimplexPoint,
    pub drift_norm: f64,
    pub eigen: EigenData,
    pub stability: Stability,
}

impl FixedPointReport {
    pub fn eigenvalues(&self) -> [f64; 2] {
        self.eigen.values
    }

    pub fn eigenvectors(&self) -> [Vec2; 2] {
        self.eigen.vectors
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedPoints {
    pub reports: Vec<FixedPointReport>,
    /// Set at `p = 7/8`, where only `0` and `γ₀` are returned and their
    /// classification carries no limit statement.
    pub classification_open: bool,
}

impl FixedPoints {
    pub fn get(&self, kind: ZeroKind) -> Option<&FixedPointReport> {
        self.reports.iter().find(|r| r.kind == kind)
    }

    pub fn locations(&self) -> Vec<SimplexPoint> {
        self.reports.iter().map(|r| r.location).collect()
    }
}

fn ballistic_discriminant(p: f64) -> f64 {
    32.0 * p * p - 52.0 * p + 21.0
}

fn eigen_cubic(p: f64) -> f64 {
    -64.0 * p * p * p + 161.0 * p * p - 134.0 * p + 37.0
}

/// The ballistic zero `γ_p` (first component larger). Defined for `p > 7/8`.
pub fn gamma_p(p: MemoryParam) -> Result<SimplexPoint> {
    let v = p.value();
    if v <= P2 {
        return Err(TheoryError::Regime {
            quantity: "gamma_p",
            p: v,
            regime: p.regime(),
        });
    }
    let root = ballistic_discriminant(v).sqrt();
    let base = 8.0 * v * v - 10.0 * v + 3.0;
    let denom = 2.0 * (2.0 * v - 1.0).powi(2);
    Ok(SimplexPoint {
        x1: (base + root) / denom,
        x2: (base - root) / denom,
    })
}

pub fn fixed_points(p: MemoryParam) -> Result<FixedPoints> {
    let mut kinds = vec![
        (ZeroKind::Origin, SimplexPoint::ORIGIN),
        (ZeroKind::Center, SimplexPoint::GAMMA0),
    ];
    if p.value() > P2 {
        let g = gamma_p(p)?;
        kinds.push((ZeroKind::Upper, g));
        kinds.push((ZeroKind::Lower, g.swapped()));
    }
    let reports = kinds
        .into_iter()
        .map(|(kind, location)| {
            let eigen = eigen_at(p, &location)?;
            let stability = if eigen.values[0] < 0.0 {
                Stability::LinearlyStable
            } else {
                Stability::LinearlyUnstable
            };
            Ok(FixedPointReport {
                kind,
                location,
                drift_norm: norm(drift(p, &location)),
                eigen,
                stability,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FixedPoints {
        reports,
        classification_open: p.is_p2(),
    })
}

fn identify(p: MemoryParam, point: &SimplexPoint) -> Option<ZeroKind> {
    const SAME: f64 = 1e-9;
    if point.distance(&SimplexPoint::ORIGIN) < SAME {
        return Some(ZeroKind::Origin);
    }
    if point.distance(&SimplexPoint::GAMMA0) < SAME {
        return Some(ZeroKind::Center);
    }
    let g = gamma_p(p).ok()?;
    if point.distance(&g) < SAME {
        Some(ZeroKind::Upper)
    } else if point.distance(&g.swapped()) < SAME {
        Some(ZeroKind::Lower)
    } else {
        None
    }
}

/// Closed-form eigenvalues and eigenvectors at a known zero.
fn closed_form(p: MemoryParam, kind: ZeroKind) -> ([f64; 2], [Vec2; 2]) {
    let v = p.value();
    let plus = [1.0, 1.0];
    let minus = [1.0, -1.0];
    match kind {
        ZeroKind::Origin => {
            let a = 4.0 * v - 3.0;
            ([1.0, a], [plus, minus])
        }
        ZeroKind::Center => {
            let a = -(7.0 - 8.0 * v) / 3.0;
            if v <= 0.5 {
                ([-1.0, a], [plus, minus])
            } else {
                ([a, -1.0], [minus, plus])
            }
        }
        ZeroKind::Upper | ZeroKind::Lower => {
            let d = ballistic_discriminant(v).sqrt();
            let q = eigen_cubic(v).sqrt();
            let values = [
                (4.0 - 5.0 * v + q) / (2.0 * v - 1.0),
                (4.0 - 5.0 * v - q) / (2.0 * v - 1.0),
            ];
            // These vectors are eigenvectors at the lower zero; at the upper
            // zero the Jacobian is conjugated by the swap, and so are they.
            let denom = 4.0 - 5.0 * v + v * d;
            let lower = [
                [1.0, -((1.0 - v) * d - q) / denom],
                [1.0, -((1.0 - v) * d + q) / denom],
            ];
            let vectors = match kind {
                ZeroKind::Lower => lower,
                _ => lower.map(|w| [1.0, 1.0 / w[1]]),
            };
            (values, vectors)
        }
    }
}

fn same_direction(a: Vec2, b: Vec2) -> bool {
    let cross = a[0] * b[1] - a[1] * b[0];
    cross.abs() <= 1e-7 * norm(a) * norm(b)
}

/// Eigenvalues (largest first) and eigenvectors of the drift Jacobian at a
/// zero, from a generic 2×2 solve, cross-checked against the closed forms
/// whenever the point is one of the known zeros.
pub fn eigen_at(p: MemoryParam, point: &SimplexPoint) -> Result<EigenData> {
    let h = norm(drift(p, point));
    if h >= ZERO_TOL {
        return Err(TheoryError::NotAZero {
            x1: point.x1,
            x2: point.x2,
            norm: h,
        });
    }
    let j = jacobian(p, point);
    let (l1, l2) = linalg::eigenvalues(&j)?;
    let vectors = match (linalg::eigenvector(&j, l1), linalg::eigenvector(&j, l2)) {
        (Some(a), Some(b)) if !same_direction(a, b) => [a, b],
        // J is a multiple of the identity (γ₀ at p = 1/2); use the p ≤ 1/2 basis.
        _ => [[1.0, 1.0], [1.0, -1.0]],
    };

    let (closed_form_values, closed_form_vectors) = match identify(p, point) {
        Some(kind) => {
            let (cv, cw) = closed_form(p, kind);
            for i in 0..2 {
                let numeric = [l1, l2][i];
                if (cv[i] - numeric).abs() > 1e-9 * (1.0 + numeric.abs()) {
                    return Err(TheoryError::ClosedFormMismatch {
                        what: "eigenvalue",
                        closed: cv[i],
                        numeric,
                    });
                }
                // Directions are only meaningful for distinct eigenvalues.
                if (l1 - l2).abs() > 1e-9 && !same_direction(cw[i], vectors[i]) {
                    return Err(TheoryError::ClosedFormMismatch {
                        what: "eigenvector slope",
                        closed: cw[i][1],
                        numeric: vectors[i][1],
                    });
                }
            }
            (Some(cv), Some(cw))
        }
        None => (None, None),
    };

    Ok(EigenData {
        values: [l1, l2],
        vectors,
        closed_form_values,
        closed_form_vectors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theory::{p3, P1};

    fn mp(p: f64) -> MemoryParam {
        MemoryParam::new(p).unwrap()
    }

    #[test]
    fn below_seven_eighths_two_zeros() {
        let fp = fixed_points(mp(0.6)).unwrap();
        assert_eq!(fp.reports.len(), 2);
        assert!(!fp.classification_open);
        let origin = fp.get(ZeroKind::Origin).unwrap();
        let center = fp.get(ZeroKind::Center).unwrap();
        assert_eq!(origin.stability, Stability::LinearlyUnstable);
        assert_eq!(center.stability, Stability::LinearlyStable);
        let expect = -(7.0 - 4.8) / 3.0;
        assert!((center.eigen.values[0] - expect).abs() < 1e-14);
        assert!((center.eigen.values[1] + 1.0).abs() < 1e-14);
        assert_eq!(center.eigen.vectors[0], [1.0, -1.0]);
    }

    #[test]
    fn open_case_flagged() {
        let fp = fixed_points(MemoryParam::p2()).unwrap();
        assert!(fp.classification_open);
        assert_eq!(fp.reports.len(), 2);
    }

    #[test]
    fn ballistic_four_zeros() {
        let fp = fixed_points(mp(0.95)).unwrap();
        assert_eq!(fp.reports.len(), 4);
        let up = fp.get(ZeroKind::Upper).unwrap();
        assert!((up.location.x1 - 0.872_111).abs() < 1e-6);
        assert!((up.location.x2 - 0.016_778).abs() < 1e-6);
        assert_eq!(up.stability, Stability::LinearlyStable);
        assert_eq!(
            fp.get(ZeroKind::Center).unwrap().stability,
            Stability::LinearlyUnstable
        );
        let low = fp.get(ZeroKind::Lower).unwrap();
        assert_eq!(low.location, up.location.swapped());
        for r in &fp.reports {
            assert!(r.drift_norm < 1e-12, "{:?}", r.kind);
            for res in r.eigen.residuals(mp(0.95), &r.location) {
                assert!(res < 1e-10);
            }
        }
    }

    #[test]
    fn gamma_p_tends_to_all_plus() {
        let g = gamma_p(mp(1.0 - 1e-9)).unwrap();
        assert!((g.x1 - 1.0).abs() < 1e-6 && g.x2.abs() < 1e-6);
    }

    #[test]
    fn gamma0_eigenvalue_at_lower_threshold() {
        let e = eigen_at(MemoryParam::p1(), &SimplexPoint::GAMMA0).unwrap();
        assert_eq!(e.closed_form_values.unwrap()[0], -0.5);
        assert!((e.values[0] + 0.5).abs() < 1e-15);
        assert_eq!(P1, 0.6875);
    }

    #[test]
    fn gamma_p_eigenvalue_at_upper_threshold() {
        let p = MemoryParam::p3();
        let g = gamma_p(p).unwrap();
        let e = eigen_at(p, &g).unwrap();
        assert!((e.values[0] + 0.5).abs() < 1e-10);
        assert!((p.value() - p3()).abs() == 0.0);
    }

    #[test]
    fn degenerate_center_at_half() {
        let e = eigen_at(mp(0.5), &SimplexPoint::GAMMA0).unwrap();
        assert!(e.values.iter().all(|l| (l + 1.0).abs() < 1e-14));
        assert_eq!(e.vectors, [[1.0, 1.0], [1.0, -1.0]]);
    }

    #[test]
    fn rejects_non_zero() {
        let x = SimplexPoint::new(0.2, 0.3).unwrap();
        assert!(matches!(
            eigen_at(mp(0.6), &x),
            Err(TheoryError::NotAZero { .. })
        ));
    }

    #[test]
    fn eigen_cubic_vanishes_at_one() {
        assert_eq!(eigen_cubic(1.0), 0.0);
        assert_eq!(ballistic_discriminant(1.0), 1.0);
    }
}
