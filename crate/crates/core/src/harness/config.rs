use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::experiments::Criterion;
use crate::error::{LppError, Result};

pub const DEFAULT_SEED: u64 = 20_240_917;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Deterministic,
    Busmar,
    Invariance,
    Burke,
    Cdf,
    Independence,
    Shen,
    Thin,
    Lln,
    All,
}

impl Suite {
    pub const ALL: [Suite; 10] = [
        Suite::Deterministic,
        Suite::Busmar,
        Suite::Invariance,
        Suite::Burke,
        Suite::Cdf,
        Suite::Independence,
        Suite::Shen,
        Suite::Thin,
        Suite::Lln,
        Suite::All,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Deterministic => "deterministic",
            Suite::Busmar => "busmar",
            Suite::Invariance => "invariance",
            Suite::Burke => "burke",
            Suite::Cdf => "cdf",
            Suite::Independence => "independence",
            Suite::Shen => "shen",
            Suite::Thin => "thin",
            Suite::Lln => "lln",
            Suite::All => "all",
        }
    }

    pub fn criteria(self) -> &'static [Criterion] {
        use Criterion::*;
        match self {
            Suite::Deterministic => &[BruteForce, IncrementAlgebra, InducedWeights, TwoRowExactness, InvarianceCoupled],
            Suite::Busmar => &[BusemannOneDirection, BusemannPrelimit],
            Suite::Invariance => &[InvarianceCoupled, InvarianceLaw],
            Suite::Burke => &[Burke],
            Suite::Cdf => &[IncrementCdf],
            Suite::Independence => &[IndependentIncrements],
            Suite::Shen => &[Shen],
            Suite::Thin => &[ThinBusemann],
            Suite::Lln => &[ThinLln],
            Suite::All => &Criterion::ALL,
        }
    }
}

impl FromStr for Suite {
    type Err = LppError;
    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| LppError::Config(format!("unknown suite {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

impl FromStr for OutputFormat {
    type Err = LppError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            _ => Err(LppError::Config(format!("unknown format {s:?}"))),
        }
    }
}

/// Parameters of a verification run. Unset optional fields fall back to each experiment's
/// acceptance defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub suite: Suite,
    pub seed: u64,
    pub k: Option<usize>,
    pub l: Option<usize>,
    pub d: Option<usize>,
    pub r: Option<Vec<f64>>,
    pub heights: Option<Vec<usize>>,
    pub replicas: Option<usize>,
    pub burn_in: usize,
    pub permutations: usize,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
    pub quick: bool,
    pub jobs: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            suite: Suite::All,
            seed: DEFAULT_SEED,
            k: None,
            l: None,
            d: None,
            r: None,
            heights: None,
            replicas: None,
            burn_in: crate::coupling::DEFAULT_BURN_IN,
            permutations: crate::stats::DEFAULT_PERMUTATIONS,
            out: None,
            format: OutputFormat::Json,
            quick: false,
            jobs: None,
        }
    }
}

impl ExperimentConfig {
    pub fn for_suite(suite: Suite) -> Self {
        ExperimentConfig { suite, ..Default::default() }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Configured directions, or `default` when unset. A bare `d` that differs from the default
    /// length selects `1, 2, 4, ...`.
    pub fn directions_or(&self, default: &[f64]) -> Vec<f64> {
        match (&self.r, self.d) {
            (Some(r), _) => r.clone(),
            (None, Some(d)) if d != default.len() => (0..d).map(|p| f64::from(1u32 << p.min(30))).collect(),
            _ => default.to_vec(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(LppError::Config(m));
        if let Some(r) = &self.r {
            if r.is_empty() || r.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
                return bad(format!("directions {r:?} must be positive and finite"));
            }
            if r.windows(2).any(|w| w[0] >= w[1]) {
                return bad(format!("directions {r:?} must increase strictly"));
            }
            if let Some(d) = self.d {
                if d != r.len() {
                    return bad(format!("d = {d} but {} directions were given", r.len()));
                }
            }
        }
        if self.d == Some(0) {
            return bad("d must be positive".into());
        }
        if self.k == Some(0) || self.l == Some(0) {
            return bad("k and l must be positive".into());
        }
        if self.replicas == Some(0) {
            return bad("replicas must be at least 1".into());
        }
        if let Some(h) = &self.heights {
            if h.is_empty() || h.windows(2).any(|w| w[0] >= w[1]) || h[0] == 0 {
                return bad(format!("heights {h:?} must be positive and strictly increasing"));
            }
        }
        if self.burn_in == 0 {
            return bad("burn-in must be positive".into());
        }
        if self.permutations == 0 {
            return bad("at least one permutation is required".into());
        }
        if self.jobs == Some(0) {
            return bad("jobs must be positive".into());
        }
        Ok(())
    }
}
