use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
    Diagnostic,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Diagnostic => "DIAGNOSTIC",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

/// What produced an estimate.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: Option<u64>,
    pub replicas: Option<u64>,
    pub n: Option<u64>,
    pub p: Option<f64>,
}

impl Provenance {
    pub fn exact(p: f64) -> Self {
        Self {
            p: Some(p),
            ..Self::default()
        }
    }

    pub fn mc(p: f64, n: u64, replicas: usize, seed: u64) -> Self {
        Self {
            seed: Some(seed),
            replicas: Some(replicas as u64),
            n: Some(n),
            p: Some(p),
        }
    }
}

/// Theory value against estimate. One-sided bounds are written as intervals
/// whose far end is the natural bound of the estimate (e.g. a fraction `≥ f`
/// is `theory = 1, tolerance = 1 - f`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub name: String,
    pub theory: f64,
    pub estimate: f64,
    pub uncertainty: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
    pub provenance: Provenance,
}

impl VerificationReport {
    /// PASS iff `|estimate - theory| ≤ tolerance`; NaN never passes.
    pub fn check(
        name: impl Into<String>,
        theory: f64,
        estimate: f64,
        uncertainty: f64,
        tolerance: f64,
        provenance: Provenance,
    ) -> Self {
        let verdict = if (estimate - theory).abs() <= tolerance {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        Self {
            name: name.into(),
            theory,
            estimate,
            uncertainty,
            tolerance,
            verdict,
            provenance,
        }
    }

    pub fn diagnostic(
        name: impl Into<String>,
        theory: f64,
        estimate: f64,
        uncertainty: f64,
        provenance: Provenance,
    ) -> Self {
        Self {
            name: name.into(),
            theory,
            estimate,
            uncertainty,
            tolerance: f64::NAN,
            verdict: Verdict::Diagnostic,
            provenance,
        }
    }

    /// Turns a checked row into a diagnostic one, keeping the numbers.
    pub fn demote(mut self) -> Self {
        self.verdict = Verdict::Diagnostic;
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict != Verdict::Fail
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:<10} {}: estimate {:.6e}", self.verdict, self.name, self.estimate)?;
        if !self.uncertainty.is_nan() {
            write!(f, " ± {:.2e}", self.uncertainty)?;
        }
        if !self.theory.is_nan() {
            write!(f, " vs theory {:.6e}", self.theory)?;
        }
        if !self.tolerance.is_nan() {
            write!(f, " (tol {:.3e})", self.tolerance)?;
        }
        Ok(())
    }
}

/// True when no row failed.
pub fn all_passed(rows: &[VerificationReport]) -> bool {
    rows.iter().all(VerificationReport::passed)
}
