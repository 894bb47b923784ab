//! Subcommands. Each resolves its flags into a parameter record, which is
//! what the manifest stores and what `replay` feeds back in.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Context, Result};
use chrono::Utc;
use serde::{Deserialize, Serialize};

use memwalk_core::engine::{
    ensemble_map, geometric_checkpoints, simulate, EnsembleCheckpoint, Erw, Ignore, MemoryProcess, Sampler,
    SeedSpec, Trajectory, TwoChannel, Urn,
};
use memwalk_core::stats::suites::{run_suite, Preset, Suite};
use memwalk_core::stats::{
    all_passed, ode_integrate, ode_start_grid, variance_exponent, FitWindow, OdeTrajectory,
};
use memwalk_core::theory::{
    conjectured_variance_exponent, fixed_points, AsymptoticConstants, Regime, Stability, P1, P2,
};
use memwalk_core::{MemoryParam, SimplexPoint};

use crate::args::{
    merge_config, parse_grid, parse_preset, parse_suite, Command, Model, OdeFlags, PArg, SamplerArg, ScanFlags,
    SimulateFlags, TheoryFlags, VerifyFlags, DEFAULT_SEED,
};
use crate::output::{fmt_f64, fmt_opt, OutputSet, RunManifest};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    /// A verification row failed, or a replay did not reproduce its digests.
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoryParams {
    pub p: Option<PArg>,
    pub grid: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateParams {
    pub p: PArg,
    pub n: u64,
    pub replicas: usize,
    pub seed: u64,
    pub model: Model,
    pub checkpoints: Vec<u64>,
    pub q: f64,
    pub sampler: SamplerArg,
    pub trajectories: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyParams {
    pub suite: Suite,
    pub preset: Preset,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanParams {
    pub grid: String,
    pub n: u64,
    pub replicas: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OdeParams {
    pub p: PArg,
    pub grid: usize,
    pub start: Option<[f64; 2]>,
    pub t_end: f64,
    pub dt: f64,
    pub sample_every: usize,
}

/// A fully resolved run.
#[derive(Debug, Clone, PartialEq)]
pub enum Run {
    Theory(TheoryParams),
    Simulate(SimulateParams),
    Verify(VerifyParams),
    Scan(ScanParams),
    Ode(OdeParams),
}

impl Run {
    pub fn resolve(command: &Command, config: Option<&Path>) -> Result<Run> {
        Ok(match command {
            Command::Theory(f) => Run::Theory(resolve_theory(merge_config(f, config)?)?),
            Command::Simulate(f) => Run::Simulate(resolve_simulate(merge_config(f, config)?)?),
            Command::Verify(f) => Run::Verify(resolve_verify(merge_config(f, config)?)?),
            Command::Scan(f) => Run::Scan(resolve_scan(merge_config(f, config)?)),
            Command::Ode(f) => Run::Ode(resolve_ode(merge_config(f, config)?)?),
            Command::Replay(_) => bail!("replay has no parameters of its own"),
        })
    }

    pub fn from_manifest(m: &RunManifest) -> Result<Run> {
        let p = m.params.clone();
        Ok(match m.subcommand.as_str() {
            "theory" => Run::Theory(serde_json::from_value(p)?),
            "simulate" => Run::Simulate(serde_json::from_value(p)?),
            "verify" => Run::Verify(serde_json::from_value(p)?),
            "scan" => Run::Scan(serde_json::from_value(p)?),
            "ode" => Run::Ode(serde_json::from_value(p)?),
            other => bail!("manifest names unknown subcommand '{other}'"),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Run::Theory(_) => "theory",
            Run::Simulate(_) => "simulate",
            Run::Verify(_) => "verify",
            Run::Scan(_) => "scan",
            Run::Ode(_) => "ode",
        }
    }

    /// File name stem of the run's outputs and manifest.
    pub fn stem(&self) -> String {
        match self {
            Run::Verify(v) => format!("verify_{}", v.suite),
            _ => self.name().to_string(),
        }
    }

    fn params_json(&self) -> Result<serde_json::Value> {
        Ok(match self {
            Run::Theory(x) => serde_json::to_value(x)?,
            Run::Simulate(x) => serde_json::to_value(x)?,
            Run::Verify(x) => serde_json::to_value(x)?,
            Run::Scan(x) => serde_json::to_value(x)?,
            Run::Ode(x) => serde_json::to_value(x)?,
        })
    }

    /// Runs into `dir`, then writes the manifest.
    pub fn execute(&self, dir: &Path) -> Result<(Outcome, RunManifest)> {
        let started = Utc::now();
        let mut out = OutputSet::create(dir)?;
        let stem = self.stem();
        let outcome = match self {
            Run::Theory(x) => theory(x, &stem, &mut out)?,
            Run::Simulate(x) => simulate_cmd(x, &stem, &mut out)?,
            Run::Verify(x) => verify(x, &stem, &mut out)?,
            Run::Scan(x) => scan(x, &stem, &mut out)?,
            Run::Ode(x) => ode(x, &stem, &mut out)?,
        };
        let manifest = RunManifest::new(self.name(), self.params_json()?, started, out.files());
        let path = manifest.write(dir, &stem)?;
        eprintln!("manifest: {}", path.display());
        Ok((outcome, manifest))
    }
}

fn resolve_theory(f: TheoryFlags) -> Result<TheoryParams> {
    match (&f.p, &f.grid) {
        (Some(_), Some(_)) => bail!("give either --p or --grid, not both"),
        (None, None) => bail!("theory needs --p or --grid"),
        _ => Ok(TheoryParams { p: f.p, grid: f.grid }),
    }
}

fn resolve_simulate(f: SimulateFlags) -> Result<SimulateParams> {
    let p = f.p.context("simulate needs --p")?;
    p.resolve()?;
    let n = f.n.unwrap_or(10_000);
    let checkpoints = match f.checkpoints {
        Some(c) => c,
        None if n >= 128 => geometric_checkpoints(7, n),
        None => vec![n],
    };
    let q = f.q.unwrap_or(0.5);
    if !(0.0..=1.0).contains(&q) {
        bail!("--q must lie in [0, 1]");
    }
    Ok(SimulateParams {
        p,
        n,
        replicas: f.replicas.unwrap_or(1_000),
        seed: f.seed.unwrap_or(DEFAULT_SEED),
        model: f.model.unwrap_or(Model::TwoChannel),
        checkpoints,
        q,
        sampler: f.sampler.unwrap_or(SamplerArg::Fast),
        trajectories: f.trajectories.unwrap_or(1),
    })
}

fn resolve_verify(f: VerifyFlags) -> Result<VerifyParams> {
    let suite = f.suite.as_deref().context("verify needs a suite name")?;
    Ok(VerifyParams {
        suite: parse_suite(suite)?,
        preset: parse_preset(f.preset.as_deref().unwrap_or("desk"))?,
        seed: f.seed.unwrap_or(DEFAULT_SEED),
    })
}

fn resolve_scan(f: ScanFlags) -> ScanParams {
    ScanParams {
        grid: f.grid.unwrap_or_else(|| "0.5:0.97:0.01".into()),
        n: f.n.unwrap_or(1 << 16),
        replicas: f.replicas.unwrap_or(500),
        seed: f.seed.unwrap_or(DEFAULT_SEED),
    }
}

fn resolve_ode(f: OdeFlags) -> Result<OdeParams> {
    let p = f.p.context("ode needs --p")?;
    p.resolve()?;
    let start = match f.start.as_deref() {
        None => None,
        Some(&[x1, x2]) => Some([x1, x2]),
        Some(_) => bail!("--start takes exactly two numbers x1,x2"),
    };
    Ok(OdeParams {
        p,
        grid: f.grid.unwrap_or(20),
        start,
        t_end: f.t_end.unwrap_or(200.0),
        dt: f.dt.unwrap_or(0.01),
        sample_every: f.sample_every.unwrap_or(100),
    })
}

#[derive(Debug, Serialize)]
struct ZeroRecord {
    kind: &'static str,
    x1: f64,
    x2: f64,
    drift_norm: f64,
    stability: Stability,
    eigenvalues: [f64; 2],
    eigenvectors: [[f64; 2]; 2],
}

#[derive(Debug, Serialize)]
struct TheoryRecord {
    p: f64,
    p_input: String,
    regime: Regime,
    interval: &'static str,
    open_case: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    message: Option<String>,
    c_p: Option<f64>,
    sigma1: Option<f64>,
    sigma2: Option<f64>,
    y_p: Option<f64>,
    alpha: Option<f64>,
    beta: Option<f64>,
    variance_exponent: Option<f64>,
    zeros: Vec<ZeroRecord>,
}

const OPEN_CASE: &str = "open case: the limit behaviour of the walk at p = 7/8 is not known";

fn theory_record(input: &PArg) -> Result<TheoryRecord> {
    let p = input.resolve()?;
    let c = AsymptoticConstants::compute(p);
    let zeros = fixed_points(p)?
        .reports
        .iter()
        .map(|r| ZeroRecord {
            kind: r.kind.label(),
            x1: r.location.x1,
            x2: r.location.x2,
            drift_norm: r.drift_norm,
            stability: r.stability,
            eigenvalues: r.eigen.values,
            eigenvectors: r.eigen.vectors,
        })
        .collect();
    Ok(TheoryRecord {
        p: p.value(),
        p_input: input.to_string(),
        regime: c.regime,
        interval: c.regime.interval(),
        open_case: p.is_p2(),
        message: p.is_p2().then(|| OPEN_CASE.to_string()),
        c_p: c.c_p().ok(),
        sigma1: c.sigma1().ok(),
        sigma2: c.sigma2().ok(),
        y_p: c.y_p().ok(),
        alpha: c.alpha().ok(),
        beta: c.beta().ok(),
        variance_exponent: conjectured_variance_exponent(p).ok(),
        zeros,
    })
}

fn theory(x: &TheoryParams, stem: &str, out: &mut OutputSet) -> Result<Outcome> {
    if let Some(p) = &x.p {
        let rec = theory_record(p)?;
        if rec.open_case {
            eprintln!("{OPEN_CASE}");
        }
        say!("{}", serde_json::to_string_pretty(&rec)?);
        out.write_json(&format!("{stem}.json"), &rec)?;
        return Ok(Outcome::Success);
    }
    let grid = parse_grid(x.grid.as_deref().unwrap_or_default())?;
    let mut rows = Vec::with_capacity(grid.len());
    for v in grid {
        let r = theory_record(&PArg::Number(v))?;
        rows.push(vec![
            fmt_f64(r.p),
            r.regime.name().to_string(),
            fmt_opt(r.c_p),
            fmt_opt(r.sigma1),
            fmt_opt(r.sigma2),
            fmt_opt(r.y_p),
            fmt_opt(r.alpha),
            fmt_opt(r.beta),
            fmt_opt(r.variance_exponent),
            r.zeros.len().to_string(),
        ]);
    }
    let header = [
        "p",
        "regime",
        "c_p",
        "sigma1",
        "sigma2",
        "y_p",
        "alpha",
        "beta",
        "variance_exponent",
        "zeros",
    ];
    let path = out.write_csv(&format!("{stem}.csv"), &header, &rows)?;
    say!("{} rows -> {}", rows.len(), path.display());
    Ok(Outcome::Success)
}

fn run_trajectories<P: MemoryProcess>(process: &P, x: &SimulateParams) -> Result<Vec<Trajectory>> {
    let seed = SeedSpec::new(x.seed);
    let runs = ensemble_map(x.replicas, &seed, |_, rng| {
        simulate(process, x.n, &x.checkpoints, rng, &mut Ignore)
    })?;
    Ok(runs.into_iter().collect::<Result<Vec<_>, _>>()?)
}

fn simulate_cmd(x: &SimulateParams, stem: &str, out: &mut OutputSet) -> Result<Outcome> {
    let p = x.p.resolve()?;
    let runs = match x.model {
        Model::TwoChannel => {
            let sampler = match x.sampler {
                SamplerArg::Fast => Sampler::Fast,
                SamplerArg::Literal => Sampler::Literal,
            };
            run_trajectories(&TwoChannel { p, sampler }, x)?
        }
        Model::Erw => run_trajectories(&Erw { p, q: x.q }, x)?,
        Model::Urn => run_trajectories(&Urn { p }, x)?,
    };
    let mut rows = Vec::with_capacity(x.checkpoints.len());
    let mut summary = Vec::with_capacity(x.checkpoints.len());
    for (k, &n) in x.checkpoints.iter().enumerate() {
        let xs: Vec<i64> = runs.iter().map(|t| t.points[k].position).collect();
        let c = EnsembleCheckpoint::from_positions(n, &xs);
        rows.push(vec![
            c.n.to_string(),
            c.count.to_string(),
            fmt_f64(c.mean_s),
            fmt_f64(c.var_s),
            fmt_f64(c.mean_ratio),
            fmt_f64(c.var_ratio),
            fmt_f64(c.kurtosis),
        ]);
        summary.push(c);
    }
    let header = ["n", "count", "mean_S", "var_S", "mean_ratio", "var_ratio", "kurtosis"];
    out.write_csv(&format!("{stem}_ensemble.csv"), &header, &rows)?;

    let traj_header: &[&str] = match x.model {
        Model::Urn => &["n", "S", "R", "B", "G"],
        _ => &["n", "S", "n_plus", "n_minus"],
    };
    for (i, t) in runs.iter().take(x.trajectories).enumerate() {
        let rows: Vec<Vec<String>> = t
            .points
            .iter()
            .map(|pt| {
                let mut r = vec![pt.n.to_string(), pt.position.to_string()];
                r.extend(pt.counts[..traj_header.len() - 2].iter().map(u64::to_string));
                r
            })
            .collect();
        out.write_csv(&format!("{stem}_trajectory_{i:04}.csv"), traj_header, &rows)?;
    }
    if let Some(c) = summary.last() {
        say!(
            "n = {}  replicas = {}  mean S = {}  var S = {}  var S/n = {}",
            c.n,
            c.count,
            c.mean_s,
            c.var_s,
            c.var_s / c.n as f64
        );
    }
    Ok(Outcome::Success)
}

fn verify(x: &VerifyParams, stem: &str, out: &mut OutputSet) -> Result<Outcome> {
    let rows = run_suite(x.suite, &x.preset.scale(), &SeedSpec::new(x.seed))?;
    for r in &rows {
        say!("{r}");
    }
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.name.clone(),
                fmt_f64(r.theory),
                fmt_f64(r.estimate),
                fmt_f64(r.uncertainty),
                fmt_f64(r.tolerance),
                r.verdict.as_str().to_string(),
            ]
        })
        .collect();
    let header = ["name", "theory", "estimate", "uncertainty", "tolerance", "verdict"];
    out.write_csv(&format!("{stem}.csv"), &header, &table)?;
    let ok = all_passed(&rows);
    say!("{} {} ({} rows)", x.suite, if ok { "PASS" } else { "FAIL" }, rows.len());
    Ok(if ok { Outcome::Success } else { Outcome::Failed })
}

/// Thresholds where the variance grows with a log correction or is unknown.
fn at_threshold(p: MemoryParam) -> bool {
    let v = p.value();
    p.regime().is_critical()
        || p.regime() == Regime::OpenBoundary
        || [P1, P2, memwalk_core::theory::p3()].iter().any(|t| (v - t).abs() < 1e-9)
}

fn scan(x: &ScanParams, stem: &str, out: &mut OutputSet) -> Result<Outcome> {
    let checkpoints = geometric_checkpoints(7, x.n);
    if checkpoints.len() < 4 {
        bail!("scan needs n >= 1024 for four checkpoints");
    }
    let seed = SeedSpec::new(x.seed);
    let mut rows = Vec::new();
    let mut plot = String::from("# p fitted_exponent theory_exponent\n");
    for v in parse_grid(&x.grid)? {
        let p = PArg::Number(v).resolve()?;
        if at_threshold(p) {
            eprintln!("skipping p = {v}: threshold value");
            continue;
        }
        let s = seed.derive(v.to_bits());
        let runs = ensemble_map(x.replicas, &s, |_, rng| {
            simulate(&TwoChannel::new(p), x.n, &checkpoints, rng, &mut Ignore)
        })?
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
        let summary: Vec<EnsembleCheckpoint> = checkpoints
            .iter()
            .enumerate()
            .map(|(k, &n)| {
                let xs: Vec<i64> = runs.iter().map(|t| t.points[k].position).collect();
                EnsembleCheckpoint::from_positions(n, &xs)
            })
            .collect();
        let fit = variance_exponent(&summary, FitWindow::TopHalf)?;
        let theory = conjectured_variance_exponent(p)?;
        rows.push(vec![
            fmt_f64(v),
            p.regime().name().to_string(),
            fmt_f64(fit.slope),
            fmt_f64(fit.stderr),
            fmt_f64(fit.r2),
            fmt_f64(theory),
        ]);
        writeln!(plot, "{v:<8} {:>12.6} {:>12.6}", fit.slope, theory)?;
        say!("p = {v:<8} fitted {:.4}  theory {:.4}", fit.slope, theory);
    }
    let header = ["p", "regime", "fitted_exponent", "stderr", "r2", "theory_exponent"];
    out.write_csv(&format!("{stem}.csv"), &header, &rows)?;
    out.write_bytes(&format!("{stem}_plot.dat"), plot.as_bytes())?;
    Ok(Outcome::Success)
}

fn ode(x: &OdeParams, stem: &str, out: &mut OutputSet) -> Result<Outcome> {
    let p = x.p.resolve()?;
    if let Some([x1, x2]) = x.start {
        let x0 = SimplexPoint::new(x1, x2).map_err(|e| anyhow::anyhow!("{e}"))?;
        let t = ode_integrate(p, x0, x.t_end, x.dt, x.sample_every)?;
        let rows: Vec<Vec<String>> = t
            .samples
            .iter()
            .map(|s| vec![fmt_f64(s.t), fmt_f64(s.x1), fmt_f64(s.x2)])
            .collect();
        out.write_csv(&format!("{stem}_trajectory.csv"), &["t", "x1", "x2"], &rows)?;
        say!(
            "terminal ({}, {}) nearest {} at distance {:.3e}",
            t.terminal.x1,
            t.terminal.x2,
            t.nearest.label(),
            t.distance
        );
        return Ok(Outcome::Success);
    }
    let mut rows = Vec::new();
    let mut counts: BTreeMap<&'static str, usize> = BTreeMap::new();
    for x0 in ode_start_grid(x.grid) {
        let t: OdeTrajectory = ode_integrate(p, x0, x.t_end, x.dt, usize::MAX)?;
        let label = if t.distance < 1e-6 { t.nearest.label() } else { "unconverged" };
        *counts.entry(label).or_default() += 1;
        rows.push(vec![
            fmt_f64(x0.x1),
            fmt_f64(x0.x2),
            fmt_f64(t.terminal.x1),
            fmt_f64(t.terminal.x2),
            label.to_string(),
            fmt_f64(t.distance),
        ]);
    }
    let header = ["start_x1", "start_x2", "terminal_x1", "terminal_x2", "label", "distance"];
    out.write_csv(&format!("{stem}_basins.csv"), &header, &rows)?;
    for (label, n) in &counts {
        say!("{label}: {n} of {}", rows.len());
    }
    Ok(Outcome::Success)
}

/// Re-runs a manifest into `dir` and compares every recorded digest.
pub fn replay(manifest: &Path, dir: &Path) -> Result<Outcome> {
    let old = RunManifest::read(manifest)?;
    let run = Run::from_manifest(&old)?;
    let (_, new) = run.execute(dir)?;
    let mut same = old.outputs.len() == new.outputs.len();
    for f in &old.outputs {
        match new.outputs.iter().find(|g| g.file == f.file) {
            Some(g) if g.sha256 == f.sha256 => say!("identical {}", f.file),
            Some(_) => {
                say!("DIFFERS   {}", f.file);
                same = false;
            }
            None => {
                say!("MISSING   {}", f.file);
                same = false;
            }
        }
    }
    Ok(if same { Outcome::Success } else { Outcome::Failed })
}
