use serde::{Deserialize, Serialize};

use super::StatsError;
use crate::engine::EnsembleCheckpoint;

/// Least-squares line through `(ln n, ln y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    pub stderr: f64,
    pub r2: f64,
    pub n_lo: u64,
    pub n_hi: u64,
    pub points: usize,
}

/// Which checkpoints enter a fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum FitWindow {
    /// The largest half of the checkpoints, at least four of them.
    #[default]
    TopHalf,
    All,
    /// Checkpoints with `lo ≤ n ≤ hi`.
    Range(u64, u64),
}

pub const MIN_FIT_POINTS: usize = 4;

impl FitWindow {
    fn select(self, ns: &[u64]) -> std::ops::Range<usize> {
        match self {
            FitWindow::All => 0..ns.len(),
            FitWindow::TopHalf => {
                let keep = ns.len().div_ceil(2).max(MIN_FIT_POINTS).min(ns.len());
                ns.len() - keep..ns.len()
            }
            FitWindow::Range(lo, hi) => {
                let a = ns.iter().position(|&n| n >= lo).unwrap_or(ns.len());
                let b = ns.iter().rposition(|&n| n <= hi).map_or(a, |i| i + 1);
                a..b.max(a)
            }
        }
    }
}

/// Fits `ln y = intercept + slope · ln n` over the window.
pub fn log_log_fit(ns: &[u64], ys: &[f64], window: FitWindow) -> Result<ExponentFit, StatsError> {
    assert_eq!(ns.len(), ys.len());
    let r = window.select(ns);
    let (ns, ys) = (&ns[r.clone()], &ys[r]);
    if ns.len() < MIN_FIT_POINTS {
        return Err(StatsError::TooFewPoints(ns.len()));
    }
    if let Some(bad) = ys.iter().find(|y| !(y.is_finite() && **y > 0.0)) {
        return Err(StatsError::Degenerate(format!(
            "log-log fit needs positive values, got {bad}"
        )));
    }
    let xs: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let ls: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ls.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ls).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ls.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(StatsError::Degenerate("all checkpoints equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = xs
        .iter()
        .zip(&ls)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let r2 = if syy > 0.0 {
        (1.0 - ssr / syy).clamp(0.0, 1.0)
    } else {
        1.0
    };
    Ok(ExponentFit {
        slope,
        intercept,
        stderr: (ssr / (k - 2.0) / sxx).sqrt(),
        r2,
        n_lo: ns[0],
        n_hi: ns[ns.len() - 1],
        points: ns.len(),
    })
}

/// Growth exponent of `Var(S_n)` from ensemble checkpoints.
pub fn variance_exponent(
    checkpoints: &[EnsembleCheckpoint],
    window: FitWindow,
) -> Result<ExponentFit, StatsError> {
    let ns: Vec<u64> = checkpoints.iter().map(|c| c.n).collect();
    let vs: Vec<f64> = checkpoints.iter().map(|c| c.var_s).collect();
    log_log_fit(&ns, &vs, window)
}

/// Mean and unbiased variance.
pub fn mean_var(xs: &[f64]) -> (f64, f64) {
    let k = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / k;
    let v = if xs.len() > 1 {
        xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (k - 1.0)
    } else {
        0.0
    };
    (m, v)
}

/// Sample moments used by the CLT-type checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub count: usize,
    pub mean: f64,
    pub var: f64,
    /// Excess kurtosis.
    pub kurtosis: f64,
    /// Standard error of the mean.
    pub se_mean: f64,
    /// Standard error of the variance, `√((m₄ - m₂²)/N)`.
    pub se_var: f64,
}

pub fn moments(xs: &[f64]) -> Moments {
    let (mean, var) = mean_var(xs);
    let k = xs.len() as f64;
    let (m2, m4) = xs.iter().fold((0.0, 0.0), |(a, b), x| {
        let d2 = (x - mean).powi(2);
        (a + d2, b + d2 * d2)
    });
    let (m2, m4) = (m2 / k, m4 / k);
    Moments {
        count: xs.len(),
        mean,
        var,
        kurtosis: m4 / (m2 * m2) - 3.0,
        se_mean: (var / k).sqrt(),
        se_var: ((m4 - m2 * m2).max(0.0) / k).sqrt(),
    }
}
