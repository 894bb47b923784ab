//! Flags, config-file merging and resolution into concrete run parameters.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use memwalk_core::stats::suites::{Preset, Suite};
use memwalk_core::theory::{p3, P1, P2};
use memwalk_core::MemoryParam;

pub const OUT_DIR_ENV: &str = "MEMWALK_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "memwalk-out";
pub const DEFAULT_SEED: u64 = 20_240_917;

#[derive(Debug, Parser)]
#[command(name = "memwalk", version, about = "Two-channel elephant random walk laboratory")]
pub struct Cli {
    /// Output directory [default: $MEMWALK_OUT_DIR, else ./memwalk-out]
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,

    /// JSON document with values for the subcommand's flags; flags win
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Regime, drift zeros and limit constants at one p or over a grid
    Theory(TheoryFlags),
    /// Run an ensemble and write per-checkpoint statistics
    Simulate(SimulateFlags),
    /// Run a verification suite; exit 1 if any row fails
    Verify(VerifyFlags),
    /// Fitted variance exponent against the predicted one over a p grid
    Scan(ScanFlags),
    /// Integrate the mean-field flow from one start or a grid of starts
    Ode(OdeFlags),
    /// Re-run a manifest and compare output digests
    Replay(ReplayFlags),
}


/// A memory parameter as typed: a decimal, or one of the threshold tokens
/// `p1`, `p2`, `p3`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PArg {
    Number(f64),
    Token(String),
}

impl FromStr for PArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        match s {
            "p1" | "p2" | "p3" => Ok(PArg::Token(s.to_string())),
            _ => s
                .parse::<f64>()
                .map(PArg::Number)
                .map_err(|_| format!("'{s}' is neither a number nor one of p1, p2, p3")),
        }
    }
}

impl fmt::Display for PArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PArg::Number(x) => write!(f, "{x}"),
            PArg::Token(t) => f.write_str(t),
        }
    }
}

impl PArg {
    pub fn resolve(&self) -> Result<MemoryParam> {
        let v = match self {
            PArg::Number(x) => *x,
            PArg::Token(t) => match t.as_str() {
                "p1" => P1,
                "p2" => P2,
                "p3" => p3(),
                other => bail!("unknown threshold token '{other}'"),
            },
        };
        MemoryParam::new(v).map_err(|e| anyhow::anyhow!("{e}"))
    }
}

/// `lo:hi:step`, inclusive of `hi` up to rounding. Values are rounded to 12
/// decimals so that e.g. `0.875` comes out exact.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<f64> = text
        .split(':')
        .map(|x| x.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .with_context(|| format!("grid '{text}' is not lo:hi:step"))?;
    let [lo, hi, step] = parts[..] else {
        bail!("grid '{text}' is not lo:hi:step");
    };
    if !(step > 0.0) || !(hi >= lo) {
        bail!("grid '{text}' needs step > 0 and hi >= lo");
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    if count > 1_000_000 {
        bail!("grid '{text}' has more than a million points");
    }
    Ok((0..count)
        .map(|k| ((lo + k as f64 * step) * 1e12).round() / 1e12)
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    TwoChannel,
    Erw,
    Urn,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SamplerArg {
    Fast,
    Literal,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TheoryFlags {
    /// Memory parameter: decimal in (0,1) or p1, p2, p3
    #[arg(long)]
    pub p: Option<PArg>,
    /// Grid lo:hi:step, written as CSV
    #[arg(long, conflicts_with = "p")]
    pub grid: Option<String>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateFlags {
    #[arg(long)]
    pub p: Option<PArg>,
    /// Horizon (steps; ball total for the urn)
    #[arg(long)]
    pub n: Option<u64>,
    #[arg(long)]
    pub replicas: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub model: Option<Model>,
    /// Comma-separated checkpoints [default: 2^7 .. 2^floor(log2 n)]
    #[arg(long, value_delimiter = ',')]
    pub checkpoints: Option<Vec<u64>>,
    /// First-step probability of +1 for the classical walk
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long, value_enum)]
    pub sampler: Option<SamplerArg>,
    /// Number of single-replica trajectory files to write
    #[arg(long)]
    pub trajectories: Option<usize>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyFlags {
    /// exact, diffusive, critical, superdiffusive, ballistic, urn, ode or all
    pub suite: Option<String>,
    /// smoke, desk or deep
    #[arg(long)]
    pub preset: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanFlags {
    /// Grid lo:hi:step
    #[arg(long)]
    pub grid: Option<String>,
    /// Largest horizon; checkpoints are 2^7 .. 2^floor(log2 n)
    #[arg(long)]
    pub n: Option<u64>,
    #[arg(long)]
    pub replicas: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OdeFlags {
    #[arg(long)]
    pub p: Option<PArg>,
    /// Starts per side of the grid
    #[arg(long)]
    pub grid: Option<usize>,
    /// Single start `x1,x2` instead of a grid; writes the flow line
    #[arg(long, value_delimiter = ',')]
    pub start: Option<Vec<f64>>,
    /// Integration horizon
    #[arg(long = "t-end")]
    pub t_end: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    /// Keep every k-th RK4 state of a single flow line
    #[arg(long)]
    pub sample_every: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct ReplayFlags {
    /// Manifest written by an earlier run
    pub manifest: PathBuf,
}

/// Overlays the flags given on the command line onto the config document.
pub fn merge_config<T: Serialize + DeserializeOwned>(flags: &T, config: Option<&Path>) -> Result<T> {
    let Some(path) = config else {
        return Ok(serde_json::from_value(serde_json::to_value(flags)?)?);
    };
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    let mut base: Value =
        serde_json::from_str(&text).with_context(|| format!("config {} is not JSON", path.display()))?;
    let Value::Object(ref mut obj) = base else {
        bail!("config {} must be a JSON object", path.display());
    };
    if let Value::Object(given) = serde_json::to_value(flags)? {
        for (k, v) in given {
            if !v.is_null() {
                obj.insert(k, v);
            }
        }
    }
    serde_json::from_value(base).with_context(|| format!("config {} does not fit this subcommand", path.display()))
}

pub fn out_dir(flag: Option<&Path>) -> PathBuf {
    flag.map(Path::to_path_buf)
        .or_else(|| std::env::var_os(OUT_DIR_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
}

pub fn parse_suite(s: &str) -> Result<Suite> {
    s.parse().map_err(anyhow::Error::msg)
}

pub fn parse_preset(s: &str) -> Result<Preset> {
    s.parse().map_err(anyhow::Error::msg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p_tokens() {
        assert_eq!("p3".parse::<PArg>().unwrap().resolve().unwrap().value(), p3());
        assert_eq!("0.875".parse::<PArg>().unwrap().resolve().unwrap().value(), P2);
        assert!("p4".parse::<PArg>().is_err());
        assert!("1.5".parse::<PArg>().unwrap().resolve().is_err());
    }

    #[test]
    fn grid_hits_decimals() {
        let g = parse_grid("0.5:0.97:0.005").unwrap();
        assert_eq!(g.len(), 95);
        assert!(g.contains(&0.875) && !g.contains(&0.6875));
        assert_eq!(*g.last().unwrap(), 0.97);
        assert!(parse_grid("0.1:0.2").is_err());
        assert!(parse_grid("0.2:0.1:0.1").is_err());
    }

    #[test]
    fn flags_override_config() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        std::fs::write(&path, r#"{"p": "p1", "n": 500, "replicas": 7}"#).unwrap();
        let flags = SimulateFlags {
            n: Some(900),
            ..Default::default()
        };
        let merged = merge_config(&flags, Some(&path)).unwrap();
        assert_eq!(merged.n, Some(900));
        assert_eq!(merged.replicas, Some(7));
        assert_eq!(merged.p, Some(PArg::Token("p1".into())));
        std::fs::write(&path, r#"{"bogus": 1}"#).unwrap();
        assert!(merge_config(&flags, Some(&path)).is_err());
    }
}
