//! Almost-sure statements evaluated along single trajectories: quadratic
//! strong law, iterated-logarithm envelope and returns to the origin.

use serde::{Deserialize, Serialize};

use super::fit::moments;
use super::report::{Provenance, VerificationReport};
use super::StatsError;
use crate::engine::{ensemble_map, simulate, Ignore, Observer, SeedSpec, Trajectory, TwoChannel};
use crate::theory::{self, Branch, MemoryParam, Regime, P2};

/// First index where `ln ln ln n > 0`, so both envelopes are defined.
pub const LIL_START: u64 = 16;

/// Running sums along one trajectory, centred at a fixed `Λ̂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathAccumulator {
    pub centre: f64,
    /// Use the log-corrected forms valid at the critical points.
    pub critical: bool,
    /// `Σ_k (S_k/k - Λ̂)²`, weighted by `(ln k)^-2` when critical.
    pub qsl_sum: f64,
    /// Running max of the scaled `|S_n/n - Λ̂|` from `n = 16`.
    pub lil_max: f64,
    pub last_n: u64,
}

impl PathAccumulator {
    pub fn new(centre: f64, critical: bool) -> Self {
        Self {
            centre,
            critical,
            qsl_sum: 0.0,
            lil_max: 0.0,
            last_n: 0,
        }
    }

    /// `(1/ln n) Σ …`, or `(1/ln ln n) Σ …` when critical.
    pub fn qsl_statistic(&self) -> f64 {
        let l = (self.last_n as f64).ln();
        if self.critical {
            self.qsl_sum / l.ln()
        } else {
            self.qsl_sum / l
        }
    }
}

impl Observer for PathAccumulator {
    #[inline]
    fn observe(&mut self, n: u64, position: i64) {
        self.last_n = n;
        let nf = n as f64;
        let d = position as f64 / nf - self.centre;
        let d2 = d * d;
        if self.critical {
            let l = nf.ln();
            self.qsl_sum += d2 / (l * l);
        } else {
            self.qsl_sum += d2;
        }
        if n >= LIL_START {
            let lll = nf.ln().ln();
            let denom = if self.critical {
                2.0 * nf.ln() * lll.ln()
            } else {
                2.0 * lll
            };
            let scaled = (nf / denom).sqrt() * d.abs();
            if scaled > self.lil_max {
                self.lil_max = scaled;
            }
        }
    }
}

/// Outcome of one trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathSummary {
    pub branch: Option<Branch>,
    pub qsl: f64,
    pub lil_max: f64,
    pub trajectory: Trajectory,
}

/// Simulates `replicas` trajectories to `n` and accumulates the pathwise
/// statistics online. Above `7/8` each replica is run twice on the same
/// stream: once to read its branch from the final sign, once centred at the
/// branch limit. Replicas ending at 0 there are dropped.
pub fn pathwise_run(
    p: MemoryParam,
    n: u64,
    checkpoints: &[u64],
    replicas: usize,
    seed: &SeedSpec,
) -> Result<Vec<PathSummary>, StatsError> {
    let walk = TwoChannel::new(p);
    let critical = p.regime().is_critical();
    let speed = if p.value() > P2 { theory::speed_c(p)? } else { 0.0 };
    let runs = ensemble_map(replicas, seed, |i, rng| -> Result<Option<PathSummary>, StatsError> {
        let branch = if speed > 0.0 {
            let first = simulate(&walk, n, &[n], rng, &mut Ignore)?;
            match Branch::from_position(first.points[0].position) {
                Some(b) => Some(b),
                None => return Ok(None),
            }
        } else {
            None
        };
        let mut replay = seed.replica_rng(i);
        let centre = branch.map_or(0.0, |b| b.sign() * speed);
        let mut acc = PathAccumulator::new(centre, critical);
        let trajectory = simulate(&walk, n, checkpoints, &mut replay, &mut acc)?;
        if let (Some(b), Some(last)) = (branch, trajectory.last()) {
            debug_assert_eq!(Branch::from_position(last.position), Some(b));
        }
        Ok(Some(PathSummary {
            branch,
            qsl: acc.qsl_statistic(),
            lil_max: acc.lil_max,
            trajectory,
        }))
    })?;
    Ok(runs
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .flatten()
        .collect())
}

fn target_variance(p: MemoryParam, branch: Option<Branch>) -> Result<f64, StatsError> {
    Ok(match p.regime() {
        Regime::Diffusive | Regime::BallisticGaussianFluct => theory::sigma1(p, branch)?,
        Regime::CriticalLower | Regime::CriticalUpper => theory::sigma2(p, branch)?,
        _ => {
            return Err(StatsError::Regime(format!(
                "no quadratic strong law at p = {p} ({})",
                p.regime()
            )))
        }
    })
}

/// Replica average of the QSL statistic against `Σ⁽¹⁾` (or `Σ⁽²⁾`).
pub fn qsl_average(
    p: MemoryParam,
    paths: &[PathSummary],
    rel_tol: f64,
    prov: Provenance,
) -> Result<VerificationReport, StatsError> {
    if paths.is_empty() {
        return Err(StatsError::Degenerate("no trajectories".into()));
    }
    let mut targets = Vec::with_capacity(paths.len());
    for s in paths {
        targets.push(target_variance(p, s.branch)?);
    }
    let target = targets.iter().sum::<f64>() / targets.len() as f64;
    let q: Vec<f64> = paths.iter().map(|s| s.qsl).collect();
    let m = moments(&q);
    Ok(VerificationReport::check("qsl.mean", target, m.mean, m.se_mean, rel_tol * target, prov))
}

/// Replica mean of the running envelope max, divided by `√Σ`. Reported
/// only.
pub fn lil_diagnostic(
    p: MemoryParam,
    paths: &[PathSummary],
    prov: Provenance,
) -> Result<VerificationReport, StatsError> {
    if paths.is_empty() {
        return Err(StatsError::Degenerate("no trajectories".into()));
    }
    let root = target_variance(p, paths[0].branch)?.sqrt();
    let r: Vec<f64> = paths.iter().map(|s| s.lil_max).collect();
    let m = moments(&r);
    Ok(VerificationReport::diagnostic("lil.envelope_max", root, m.mean, m.se_mean, prov))
}

/// Number of indices `n ≥ 1` with `S_n = 0` up to the last checkpoint.
pub fn returns_count(trajectory: &Trajectory) -> u64 {
    trajectory.last().map_or(0, |t| t.origin_visits)
}

fn median(mut xs: Vec<u64>) -> f64 {
    xs.sort_unstable();
    let k = xs.len();
    if k == 0 {
        f64::NAN
    } else if k % 2 == 1 {
        xs[k / 2] as f64
    } else {
        0.5 * (xs[k / 2 - 1] + xs[k / 2]) as f64
    }
}

/// Returns between the first and last checkpoint. Rows are diagnostic: the
/// median count at both ends, and the fraction of replicas that did not
/// return at all in between.
pub fn returns_diagnostic(paths: &[PathSummary], prov: Provenance) -> Vec<VerificationReport> {
    let early: Vec<u64> = paths
        .iter()
        .filter_map(|s| s.trajectory.points.first().map(|t| t.origin_visits))
        .collect();
    let late: Vec<u64> = paths.iter().map(|s| returns_count(&s.trajectory)).collect();
    let frozen = early.iter().zip(&late).filter(|(a, b)| a == b).count() as f64 / late.len().max(1) as f64;
    vec![
        VerificationReport::diagnostic("returns.median_first_checkpoint", f64::NAN, median(early), f64::NAN, prov),
        VerificationReport::diagnostic("returns.median_last_checkpoint", f64::NAN, median(late), f64::NAN, prov),
        VerificationReport::diagnostic("returns.fraction_without_new_returns", f64::NAN, frozen, f64::NAN, prov),
    ]
}
