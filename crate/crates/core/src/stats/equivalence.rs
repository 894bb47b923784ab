//! Distributional equivalence tests: sampler against sampler, urn against
//! walk.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::fit::moments;
use super::report::{Provenance, VerificationReport};
use super::StatsError;
use crate::engine::{
    below, ensemble_positions, step_fast, step_literal, uniform, SeedSpec, StreamRng, TwoChannel, Urn,
    WalkState,
};
use crate::theory::MemoryParam;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
}

/// Homogeneity test of two count vectors over the same categories.
/// Categories empty in both samples are dropped.
pub fn chi_square_homogeneity<const K: usize>(a: &[u64; K], b: &[u64; K]) -> Result<ChiSquare, StatsError> {
    let na: u64 = a.iter().sum();
    let nb: u64 = b.iter().sum();
    if na == 0 || nb == 0 {
        return Err(StatsError::Degenerate("empty sample".into()));
    }
    let total = (na + nb) as f64;
    let mut stat = 0.0;
    let mut used = 0;
    for k in 0..K {
        let col = (a[k] + b[k]) as f64;
        if col == 0.0 {
            continue;
        }
        used += 1;
        for (obs, n) in [(a[k], na), (b[k], nb)] {
            let e = n as f64 * col / total;
            stat += (obs as f64 - e).powi(2) / e;
        }
    }
    if used < 2 {
        return Ok(ChiSquare { statistic: 0.0, df: 0, p_value: 1.0 });
    }
    let df = used - 1;
    let dist = ChiSquared::new(df as f64).map_err(|e| StatsError::Degenerate(e.to_string()))?;
    Ok(ChiSquare {
        statistic: stat,
        df,
        p_value: dist.sf(stat),
    })
}

/// Next-step category counts of both samplers from one fixed state.
pub fn sampler_counts(p: MemoryParam, state: WalkState, draws: u64, rng: &mut StreamRng) -> ([u64; 3], [u64; 3]) {
    let tally = |next: WalkState| -> usize {
        if next.n_plus > state.n_plus {
            0
        } else if next.n_minus > state.n_minus {
            1
        } else {
            2
        }
    };
    let mut lit = [0u64; 3];
    let mut fast = [0u64; 3];
    for _ in 0..draws {
        lit[tally(step_literal(p, state, rng))] += 1;
        fast[tally(step_fast(p, state, rng))] += 1;
    }
    (lit, fast)
}

/// `pairs` random `(p, state)` pairs, a pure function of the seed.
pub fn sampler_test_cases(pairs: usize, seed: &SeedSpec) -> Vec<(MemoryParam, WalkState)> {
    let mut rng = seed.replica_rng(u64::MAX);
    (0..pairs)
        .map(|_| {
            let p = MemoryParam::new(0.02 + 0.96 * uniform(&mut rng)).expect("inside (0,1)");
            let n = 2 + below(&mut rng, 5000);
            let n_plus = (uniform(&mut rng) * (n + 1) as f64) as u64;
            let n_minus = (uniform(&mut rng) * (n - n_plus + 1) as f64) as u64;
            (p, WalkState::new(n, n_plus.min(n), n_minus.min(n - n_plus)).expect("valid counts"))
        })
        .collect()
}

/// Literal against fast sampler at every case; the reported estimate is the
/// smallest p-value, which must not fall below `alpha`.
pub fn sampler_equivalence(
    cases: &[(MemoryParam, WalkState)],
    draws: u64,
    alpha: f64,
    seed: &SeedSpec,
) -> Result<(VerificationReport, Vec<ChiSquare>), StatsError> {
    let results = crate::engine::ensemble_map(cases.len(), seed, |i, rng| {
        let (p, s) = cases[i as usize];
        let (a, b) = sampler_counts(p, s, draws, rng);
        chi_square_homogeneity(&a, &b)
    })?
    .into_iter()
    .collect::<Result<Vec<_>, _>>()?;
    let min_p = results.iter().map(|c| c.p_value).fold(1.0, f64::min);
    let prov = Provenance {
        seed: Some(seed.master_seed),
        replicas: Some(cases.len() as u64),
        n: Some(draws),
        p: None,
    };
    let report = VerificationReport::check(
        "samplers.min_chi2_p_value",
        0.5 * (1.0 + alpha),
        min_p,
        f64::NAN,
        0.5 * (1.0 - alpha),
        prov,
    );
    Ok((report, results))
}

/// `R - B` after `n` draws against `S_{n+2}`: mean and variance, each within
/// `k_se` pooled standard errors. Both processes run on independent seeds.
pub fn urn_embedding_test(
    p: MemoryParam,
    n: u64,
    replicas: usize,
    seed: &SeedSpec,
    k_se: f64,
) -> Result<Vec<VerificationReport>, StatsError> {
    let horizon = n + 2;
    let urn = ensemble_positions(&Urn { p }, horizon, &[horizon], replicas, &seed.derive(1))?.last_column();
    let walk = ensemble_positions(&TwoChannel::new(p), horizon, &[horizon], replicas, &seed.derive(2))?.last_column();
    let to_f = |v: Vec<i64>| v.into_iter().map(|x| x as f64).collect::<Vec<_>>();
    let (mu, mw) = (moments(&to_f(urn)), moments(&to_f(walk)));
    let prov = Provenance::mc(p.value(), n, replicas, seed.master_seed);
    let se_mean = mu.se_mean.hypot(mw.se_mean);
    let se_var = mu.se_var.hypot(mw.se_var);
    Ok(vec![
        VerificationReport::check("urn.mean_imbalance", mw.mean, mu.mean, se_mean, k_se * se_mean, prov),
        VerificationReport::check("urn.var_imbalance", mw.var, mu.var, se_var, k_se * se_var, prov),
    ])
}
