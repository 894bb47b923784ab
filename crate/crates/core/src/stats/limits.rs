//! Checks of the distributional limit theorems against ensemble positions.

use serde::{Deserialize, Serialize};

use super::fit::{log_log_fit, moments, ExponentFit, FitWindow};
use super::report::{Provenance, VerificationReport};
use super::StatsError;
use crate::engine::EnsemblePositions;
use crate::theory::{self, Branch, MemoryParam, Regime, P2};

/// Centring of `S_n / n` for each replica.
///
/// Below `7/8` the limit is 0. Above it the branch is read off the sign of the
/// final position and the centre is `±c_p`; replicas ending at 0 carry no
/// branch and are excluded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchAssignment {
    pub branches: Vec<Option<Branch>>,
    pub speed: f64,
    pub excluded: usize,
}

impl BranchAssignment {
    pub fn from_final_positions(p: MemoryParam, finals: &[i64]) -> Result<Self, StatsError> {
        if p.value() < P2 {
            return Ok(Self {
                branches: vec![None; finals.len()],
                speed: 0.0,
                excluded: 0,
            });
        }
        let speed = theory::speed_c(p)?;
        let branches: Vec<Option<Branch>> = finals.iter().map(|&s| Branch::from_position(s)).collect();
        let excluded = branches.iter().filter(|b| b.is_none()).count();
        Ok(Self {
            branches,
            speed,
            excluded,
        })
    }

    /// `Λ̂` for replica `i`, or `None` if it is excluded.
    pub fn centre(&self, i: usize) -> Option<f64> {
        if self.speed == 0.0 {
            Some(0.0)
        } else {
            self.branches[i].map(|b| b.sign() * self.speed)
        }
    }

    /// `(S_n/n - Λ̂) · scale` for the included replicas, optionally restricted
    /// to one branch.
    pub fn centred(&self, n: u64, positions: &[i64], scale: f64, only: Option<Branch>) -> Vec<f64> {
        positions
            .iter()
            .enumerate()
            .filter(|(i, _)| only.is_none() || self.branches[*i] == only)
            .filter_map(|(i, &s)| self.centre(i).map(|c| (s as f64 / n as f64 - c) * scale))
            .collect()
    }
}

fn regime_error(check: &str, p: MemoryParam) -> StatsError {
    StatsError::Regime(format!("{check} does not apply at p = {p} ({})", p.regime()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CltTolerance {
    /// Relative tolerance on the variance.
    pub variance_rel: f64,
    /// Absolute tolerance on the excess kurtosis.
    pub kurtosis: f64,
    /// Mean tolerance in standard errors.
    pub mean_se: f64,
}

impl Default for CltTolerance {
    fn default() -> Self {
        Self {
            variance_rel: 0.05,
            kurtosis: 0.15,
            mean_se: 4.0,
        }
    }
}

/// `W = √n (S_n/n - Λ̂)`: variance against `Σ⁽¹⁾`, kurtosis against 0, mean
/// against 0.
pub fn clt_check(
    p: MemoryParam,
    n: u64,
    positions: &[i64],
    tol: &CltTolerance,
    prov: Provenance,
) -> Result<Vec<VerificationReport>, StatsError> {
    if !matches!(p.regime(), Regime::Diffusive | Regime::BallisticGaussianFluct) {
        return Err(regime_error("the diffusive CLT", p));
    }
    let sigma = theory::sigma1(p, None)?;
    let assign = BranchAssignment::from_final_positions(p, positions)?;
    let w = assign.centred(n, positions, (n as f64).sqrt(), None);
    let m = moments(&w);
    Ok(vec![
        VerificationReport::check("clt.variance", sigma, m.var, m.se_var, tol.variance_rel * sigma, prov),
        VerificationReport::check("clt.excess_kurtosis", 0.0, m.kurtosis, f64::NAN, tol.kurtosis, prov),
        VerificationReport::check("clt.mean", 0.0, m.mean, m.se_mean, tol.mean_se * m.se_mean, prov),
    ])
}

/// `W = √(n / ln n) (S_n/n - Λ̂)` at the two critical points, against `Σ⁽²⁾`
/// (per branch at the upper one).
pub fn critical_clt_check(
    p: MemoryParam,
    n: u64,
    positions: &[i64],
    variance_rel: f64,
    prov: Provenance,
) -> Result<Vec<VerificationReport>, StatsError> {
    if !p.regime().is_critical() {
        return Err(regime_error("the critical CLT", p));
    }
    let nf = n as f64;
    let scale = (nf / nf.ln()).sqrt();
    let assign = BranchAssignment::from_final_positions(p, positions)?;
    let groups: Vec<(String, Option<Branch>)> = if p.is_p1() {
        vec![("critical_clt.variance".into(), None)]
    } else {
        Branch::BOTH
            .iter()
            .map(|&b| (format!("critical_clt.variance.{b:?}").to_lowercase(), Some(b)))
            .collect()
    };
    let mut out = Vec::new();
    for (name, branch) in groups {
        let sigma = theory::sigma2(p, branch)?;
        let w = assign.centred(n, positions, scale, branch);
        if w.len() < 2 {
            return Err(StatsError::Degenerate(format!("{name}: {} replicas", w.len())));
        }
        let m = moments(&w);
        out.push(VerificationReport::check(name, sigma, m.var, m.se_var, variance_rel * sigma, prov));
    }
    Ok(out)
}

/// Slope of `ln Var(S_n/n - Λ̂)` against `ln n`.
pub fn fluctuation_exponent(
    p: MemoryParam,
    ensemble: &EnsemblePositions,
    window: FitWindow,
) -> Result<(ExponentFit, usize), StatsError> {
    let assign = BranchAssignment::from_final_positions(p, &ensemble.last_column())?;
    let vars: Vec<f64> = ensemble
        .checkpoints
        .iter()
        .enumerate()
        .map(|(k, &n)| moments(&assign.centred(n, &ensemble.column(k), 1.0, None)).var)
        .collect();
    Ok((log_log_fit(&ensemble.checkpoints, &vars, window)?, assign.excluded))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuperdiffusiveTolerance {
    pub fluctuation_slope: f64,
    pub variance_slope: f64,
}

impl Default for SuperdiffusiveTolerance {
    fn default() -> Self {
        Self {
            fluctuation_slope: 0.1,
            variance_slope: 0.1,
        }
    }
}

/// Fluctuation decay `-2 y_p`, and on `(11/16, 7/8)` the growth exponent of
/// `Var(S_n)`, `8(2p-1)/3`.
pub fn superdiffusive_fit(
    p: MemoryParam,
    ensemble: &EnsemblePositions,
    window: FitWindow,
    tol: &SuperdiffusiveTolerance,
    prov: Provenance,
) -> Result<Vec<VerificationReport>, StatsError> {
    let y = match p.regime() {
        Regime::Superdiffusive | Regime::BallisticSuperdiffusiveFluct => theory::exponent_y(p)?,
        _ => return Err(regime_error("the superdiffusive fit", p)),
    };
    let (fit, _) = fluctuation_exponent(p, ensemble, window)?;
    let mut out = vec![VerificationReport::check(
        "superdiffusive.fluctuation_slope",
        -2.0 * y,
        fit.slope,
        fit.stderr,
        tol.fluctuation_slope,
        prov,
    )];
    if let Some(r) = limit_stability(p, ensemble, y)? {
        out.push(VerificationReport::diagnostic("superdiffusive.limit_correlation", 1.0, r, f64::NAN, prov));
    }
    if p.regime() == Regime::Superdiffusive {
        let summary = ensemble.summarize();
        let v = super::fit::variance_exponent(&summary, window)?;
        out.push(VerificationReport::check(
            "superdiffusive.variance_slope",
            theory::conjectured_variance_exponent(p)?,
            v.slope,
            v.stderr,
            tol.variance_slope,
            prov,
        ));
    }
    Ok(out)
}

/// Correlation across replicas of `n^{y_p}(S_n/n - Λ̂)` at the last two
/// checkpoints. Near 1 once the random limit has settled.
pub fn limit_stability(p: MemoryParam, ensemble: &EnsemblePositions, y: f64) -> Result<Option<f64>, StatsError> {
    let k = ensemble.checkpoints.len();
    if k < 2 {
        return Ok(None);
    }
    let assign = BranchAssignment::from_final_positions(p, &ensemble.last_column())?;
    let scaled = |j: usize| {
        let n = ensemble.checkpoints[j];
        assign.centred(n, &ensemble.column(j), (n as f64).powf(y), None)
    };
    let (a, b) = (scaled(k - 2), scaled(k - 1));
    let (ma, mb) = (moments(&a), moments(&b));
    let cov = a.iter().zip(&b).map(|(x, z)| (x - ma.mean) * (z - mb.mean)).sum::<f64>() / (a.len() as f64 - 1.0);
    Ok(Some(cov / (ma.var * mb.var).sqrt()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallisticTolerance {
    /// Half-width of the band around `c_p`.
    pub band: f64,
    /// Minimum fraction of replicas inside the band.
    pub min_fraction: f64,
    pub sign_split: f64,
    pub mean: f64,
}

impl Default for BallisticTolerance {
    fn default() -> Self {
        Self {
            band: 0.05,
            min_fraction: 0.90,
            sign_split: 0.045,
            mean: 0.06,
        }
    }
}

/// Concentration of `|S_n|/n` at `c_p`, symmetry of the branch choice and
/// zero mean of `S_n/n`.
pub fn ballistic_check(
    p: MemoryParam,
    n: u64,
    positions: &[i64],
    tol: &BallisticTolerance,
    prov: Provenance,
) -> Result<Vec<VerificationReport>, StatsError> {
    if p.value() <= P2 {
        return Err(regime_error("the ballistic check", p));
    }
    let c = theory::speed_c(p)?;
    let k = positions.len() as f64;
    let ratios: Vec<f64> = positions.iter().map(|&s| s as f64 / n as f64).collect();
    let inside = ratios.iter().filter(|r| (r.abs() - c).abs() <= tol.band).count() as f64 / k;
    let signed: Vec<f64> = positions.iter().filter(|&&s| s != 0).map(|&s| s.signum() as f64).collect();
    let up = signed.iter().filter(|&&s| s > 0.0).count() as f64 / signed.len() as f64;
    let m = moments(&ratios);
    Ok(vec![
        VerificationReport::check(
            "ballistic.fraction_near_speed",
            1.0,
            inside,
            (inside * (1.0 - inside) / k).sqrt(),
            1.0 - tol.min_fraction,
            prov,
        ),
        VerificationReport::check(
            "ballistic.sign_split",
            0.5,
            up,
            (0.25 / signed.len() as f64).sqrt(),
            tol.sign_split,
            prov,
        ),
        VerificationReport::check("ballistic.mean_ratio", 0.0, m.mean, m.se_mean, tol.mean, prov),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mp(p: f64) -> MemoryParam {
        MemoryParam::new(p).unwrap()
    }

    #[test]
    fn assignment_rules() {
        let a = BranchAssignment::from_final_positions(mp(0.95), &[10, -4, 0]).unwrap();
        assert_eq!(a.excluded, 1);
        let c = theory::speed_c(mp(0.95)).unwrap();
        assert_eq!(a.centre(0), Some(c));
        assert_eq!(a.centre(1), Some(-c));
        assert_eq!(a.centre(2), None);
        assert_eq!(a.centred(10, &[10, -4, 0], 1.0, Some(Branch::Lower)).len(), 1);
        let d = BranchAssignment::from_final_positions(mp(0.5), &[0, 3]).unwrap();
        assert_eq!((d.excluded, d.centre(0)), (0, Some(0.0)));
    }

    #[test]
    fn regime_guards() {
        let pv = Provenance::default();
        assert!(clt_check(mp(0.8), 100, &[1, 2], &CltTolerance::default(), pv).is_err());
        assert!(critical_clt_check(mp(0.6), 100, &[1, 2], 0.1, pv).is_err());
        assert!(ballistic_check(mp(0.8), 100, &[1, 2], &BallisticTolerance::default(), pv).is_err());
    }

    #[test]
    fn ballistic_on_synthetic_sample() {
        let c = theory::speed_c(mp(0.95)).unwrap();
        let n = 1000;
        let s = (c * n as f64).round() as i64;
        let xs: Vec<i64> = (0..100).map(|i| if i % 2 == 0 { s } else { -s }).collect();
        let rows = ballistic_check(mp(0.95), n, &xs, &BallisticTolerance::default(), Provenance::default()).unwrap();
        assert!(super::super::all_passed(&rows), "{rows:?}");
        assert_eq!(rows[0].estimate, 1.0);
    }
}
