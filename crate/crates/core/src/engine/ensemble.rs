use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::process::{MemoryProcess, Observer};
use super::rng::{SeedSpec, StreamRng};
use super::EngineError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub n: u64,
    pub position: i64,
    pub counts: [u64; 3],
    /// Indices `k ≤ n` with position 0.
    pub origin_visits: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trajectory {
    pub points: Vec<TrajectoryPoint>,
}

impl Trajectory {
    pub fn last(&self) -> Option<&TrajectoryPoint> {
        self.points.last()
    }
}

/// `{2^k : lo ≤ k, 2^k ≤ n_max}`.
pub fn geometric_checkpoints(lo: u32, n_max: u64) -> Vec<u64> {
    (lo..64)
        .map(|k| 1u64 << k)
        .take_while(|&n| n <= n_max)
        .collect()
}

fn validate(start: u64, n_max: u64, checkpoints: &[u64]) -> Result<(), EngineError> {
    if n_max < start.max(2) {
        return Err(EngineError::HorizonTooShort(n_max));
    }
    if checkpoints.is_empty() {
        return Err(EngineError::Checkpoints("empty checkpoint list".into()));
    }
    if checkpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(EngineError::Checkpoints(
            "checkpoints must be strictly increasing".into(),
        ));
    }
    let (first, last) = (checkpoints[0], checkpoints[checkpoints.len() - 1]);
    if first < start || last > n_max {
        return Err(EngineError::Checkpoints(format!(
            "checkpoints must lie in [{start}, {n_max}], got [{first}, {last}]"
        )));
    }
    Ok(())
}

/// Runs one replica from its initial state to `n_max`, recording the
/// checkpoints and feeding every `(n, position)` to `observer`.
pub fn simulate<P: MemoryProcess, O: Observer>(
    process: &P,
    n_max: u64,
    checkpoints: &[u64],
    rng: &mut StreamRng,
    observer: &mut O,
) -> Result<Trajectory, EngineError> {
    validate(process.start_time(), n_max, checkpoints)?;
    let mut points = Vec::with_capacity(checkpoints.len());
    let mut next = checkpoints.iter().copied().peekable();
    let mut s = process.init(rng);
    let mut visits = 0u64;
    loop {
        let n = P::time(&s);
        let x = P::position(&s);
        visits += u64::from(x == 0);
        observer.observe(n, x);
        if next.peek() == Some(&n) {
            next.next();
            points.push(TrajectoryPoint {
                n,
                position: x,
                counts: P::counts(&s),
                origin_visits: visits,
            });
        }
        if n >= n_max {
            break;
        }
        s = process.step(s, rng);
    }
    Ok(Trajectory { points })
}

/// Maps `f` over replica indices in parallel, each with its own stream.
/// The result is in replica order whatever the thread count.
pub fn ensemble_map<T, F>(replicas: usize, seed: &SeedSpec, f: F) -> Result<Vec<T>, EngineError>
where
    T: Send,
    F: Fn(u64, &mut StreamRng) -> T + Sync + Send,
{
    if replicas == 0 {
        return Err(EngineError::NoReplicas);
    }
    let mut out = Vec::new();
    out.try_reserve_exact(replicas)
        .map_err(|_| EngineError::OutOfMemory(replicas))?;
    (0..replicas)
        .into_par_iter()
        .map(|i| {
            let mut rng = seed.replica_rng(i as u64);
            f(i as u64, &mut rng)
        })
        .collect_into_vec(&mut out);
    Ok(out)
}

/// Positions of every replica at every checkpoint.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnsemblePositions {
    pub checkpoints: Vec<u64>,
    /// `rows[replica][checkpoint]`
    pub rows: Vec<Vec<i64>>,
}

impl EnsemblePositions {
    pub fn column(&self, k: usize) -> Vec<i64> {
        self.rows.iter().map(|r| r[k]).collect()
    }

    pub fn last_column(&self) -> Vec<i64> {
        self.column(self.checkpoints.len() - 1)
    }

    pub fn summarize(&self) -> Vec<EnsembleCheckpoint> {
        self.checkpoints
            .iter()
            .enumerate()
            .map(|(k, &n)| EnsembleCheckpoint::from_positions(n, &self.column(k)))
            .collect()
    }
}

pub fn ensemble_positions<P: MemoryProcess>(
    process: &P,
    n_max: u64,
    checkpoints: &[u64],
    replicas: usize,
    seed: &SeedSpec,
) -> Result<EnsemblePositions, EngineError> {
    validate(process.start_time(), n_max, checkpoints)?;
    let rows = ensemble_map(replicas, seed, |_, rng| {
        simulate(process, n_max, checkpoints, rng, &mut super::Ignore)
            .map(|t| t.points.iter().map(|pt| pt.position).collect::<Vec<_>>())
    })?
    .into_iter()
    .collect::<Result<Vec<_>, _>>()?;
    Ok(EnsemblePositions {
        checkpoints: checkpoints.to_vec(),
        rows,
    })
}

pub fn ensemble_run<P: MemoryProcess>(
    process: &P,
    n_max: u64,
    checkpoints: &[u64],
    replicas: usize,
    seed: &SeedSpec,
) -> Result<Vec<EnsembleCheckpoint>, EngineError> {
    Ok(ensemble_positions(process, n_max, checkpoints, replicas, seed)?.summarize())
}

/// Cross-replica statistics of `S_n` at one checkpoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleCheckpoint {
    pub n: u64,
    pub count: u64,
    pub mean_s: f64,
    /// Unbiased sample variance.
    pub var_s: f64,
    /// Mean of `S_n / n`.
    pub mean_ratio: f64,
    /// Variance of `S_n / n`.
    pub var_ratio: f64,
    /// Excess kurtosis `m₄/m₂² - 3` of `S_n`; NaN when `m₂ = 0`.
    pub kurtosis: f64,
}

impl EnsembleCheckpoint {
    /// Mean and variance come from exact integer power sums; the kurtosis
    /// from a second pass in replica order.
    pub fn from_positions(n: u64, xs: &[i64]) -> Self {
        let count = xs.len() as u64;
        let (s1, s2) = xs.iter().fold((0i128, 0i128), |(a, b), &x| {
            let x = x as i128;
            (a + x, b + x * x)
        });
        let c = count as i128;
        let mean_s = s1 as f64 / count as f64;
        let var_s = if count > 1 {
            (c * s2 - s1 * s1) as f64 / (c * (c - 1)) as f64
        } else {
            0.0
        };
        let (m2, m4) = xs.iter().fold((0.0, 0.0), |(a, b), &x| {
            let d = x as f64 - mean_s;
            let d2 = d * d;
            (a + d2, b + d2 * d2)
        });
        let (m2, m4) = (m2 / count as f64, m4 / count as f64);
        let kurtosis = if m2 > 0.0 { m4 / (m2 * m2) - 3.0 } else { f64::NAN };
        let nf = n as f64;
        Self {
            n,
            count,
            mean_s,
            var_s,
            mean_ratio: mean_s / nf,
            var_ratio: var_s / (nf * nf),
            kurtosis,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{Ignore, TwoChannel, Urn};
    use crate::theory::MemoryParam;

    fn walk(p: f64) -> TwoChannel {
        TwoChannel::new(MemoryParam::new(p).unwrap())
    }

    #[test]
    fn checkpoint_validation() {
        let w = walk(0.5);
        let mut rng = SeedSpec::new(0).replica_rng(0);
        assert!(matches!(
            simulate(&w, 1, &[1], &mut rng, &mut Ignore),
            Err(EngineError::HorizonTooShort(1))
        ));
        assert!(simulate(&w, 100, &[10, 10], &mut rng, &mut Ignore).is_err());
        assert!(simulate(&w, 100, &[10, 200], &mut rng, &mut Ignore).is_err());
        assert!(simulate(&w, 100, &[2, 100], &mut rng, &mut Ignore).is_ok());
    }

    #[test]
    fn counts_reconstruct_position() {
        let mut rng = SeedSpec::new(1).replica_rng(0);
        let cps = geometric_checkpoints(1, 1 << 14);
        let t = simulate(&walk(0.9), 1 << 14, &cps, &mut rng, &mut Ignore).unwrap();
        assert_eq!(t.points.len(), cps.len());
        for pt in &t.points {
            assert_eq!(pt.position, pt.counts[0] as i64 - pt.counts[1] as i64);
            assert_eq!(pt.counts.iter().sum::<u64>(), pt.n);
            assert!(pt.position.unsigned_abs() <= pt.n);
        }
    }

    #[test]
    fn observer_sees_every_step_and_visits_match() {
        let mut rng = SeedSpec::new(2).replica_rng(0);
        let mut seen = Vec::new();
        let mut zeros = 0;
        let t = simulate(
            &walk(0.5),
            1000,
            &[1000],
            &mut rng,
            &mut |n: u64, x: i64| {
                seen.push(n);
                zeros += u64::from(x == 0);
            },
        )
        .unwrap();
        assert_eq!(seen, (2..=1000).collect::<Vec<_>>());
        assert_eq!(t.points[0].origin_visits, zeros);
    }

    #[test]
    fn single_replica_matches_simulate() {
        let seed = SeedSpec::new(3);
        let cps = [16, 256, 4096];
        let e = ensemble_positions(&walk(0.7), 4096, &cps, 1, &seed).unwrap();
        let t = simulate(&walk(0.7), 4096, &cps, &mut seed.replica_rng(0), &mut Ignore).unwrap();
        let direct: Vec<i64> = t.points.iter().map(|p| p.position).collect();
        assert_eq!(e.rows[0], direct);
    }

    #[test]
    fn thread_count_does_not_change_output() {
        let seed = SeedSpec::new(4);
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| ensemble_run(&walk(0.8), 2048, &[64, 2048], 300, &seed).unwrap())
        };
        let a = run(1);
        let b = run(3);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.mean_s.to_bits(), y.mean_s.to_bits());
            assert_eq!(x.var_s.to_bits(), y.var_s.to_bits());
            assert_eq!(x.kurtosis.to_bits(), y.kurtosis.to_bits());
        }
    }

    #[test]
    fn symmetric_mean_at_half() {
        let e = ensemble_run(&walk(0.5), 1000, &[1000], 10_000, &SeedSpec::new(5)).unwrap();
        let c = e[0];
        let se = (c.var_s / c.count as f64).sqrt();
        assert!(c.mean_s.abs() < 4.0 * se, "{c:?}");
    }

    #[test]
    fn urn_indexed_by_total() {
        let p = MemoryParam::new(0.6).unwrap();
        let mut rng = SeedSpec::new(6).replica_rng(0);
        let t = simulate(&Urn { p }, 50, &[2, 50], &mut rng, &mut Ignore).unwrap();
        assert_eq!(t.points[1].counts.iter().sum::<u64>(), 50);
        assert_eq!(t.points[0].counts[2], 0);
    }

    #[test]
    fn moments_from_known_sample() {
        let c = EnsembleCheckpoint::from_positions(10, &[-2, 0, 0, 2]);
        assert_eq!(c.mean_s, 0.0);
        assert!((c.var_s - 8.0 / 3.0).abs() < 1e-15);
        // m2 = 2, m4 = 8
        assert!((c.kurtosis + 1.0).abs() < 1e-15);
        assert!((c.var_ratio - 8.0 / 300.0).abs() < 1e-15);
        assert!(EnsembleCheckpoint::from_positions(4, &[1, 1]).kurtosis.is_nan());
    }

    #[test]
    fn no_replicas_is_an_error() {
        assert!(matches!(
            ensemble_run(&walk(0.5), 10, &[10], 0, &SeedSpec::new(0)),
            Err(EngineError::NoReplicas)
        ));
    }
}
