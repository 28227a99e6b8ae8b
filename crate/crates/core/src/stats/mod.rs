//! Distributional tests used by the verification suites.

mod dcor;
mod energy;
mod ks;

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{LppError, Result};

pub use dcor::{distance_correlation, independence_test};
pub use energy::{energy_distance, energy_distance_test};
pub use ks::{
    atom_tail_test, exp_cdf, ks_one_sample, ks_one_sample_exp, ks_two_sample, AtomTailReport,
    ATOM_EPS,
};

/// Default significance for permutation tests.
pub const SIGNIFICANCE: f64 = 0.001;
/// Default number of label shuffles; with 1999 the smallest attainable p-value is 0.0005, so a
/// 0.001 cut-off can actually reject.
pub const DEFAULT_PERMUTATIONS: usize = 1999;
/// Asymptotic Kolmogorov critical value at α = 0.001.
pub const KS_CRITICAL_001: f64 = 1.95;

/// Finite scalar observations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Sample(Vec<f64>);

impl TryFrom<Vec<f64>> for Sample {
    type Error = LppError;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Sample::new(v)
    }
}

impl From<Sample> for Vec<f64> {
    fn from(s: Sample) -> Self {
        s.0
    }
}

impl Sample {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(LppError::invalid(format!("sample contains non-finite value {v}")));
        }
        Ok(Sample(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.0.iter().sum::<f64>() / self.0.len() as f64
    }

    pub(crate) fn sorted(&self) -> Vec<f64> {
        let mut v = self.0.clone();
        v.sort_by(f64::total_cmp);
        v
    }
}

/// `n` observations of a `dim`-dimensional vector, stored row by row.
#[derive(Debug, Clone, PartialEq)]
pub struct JointSample {
    dim: usize,
    data: Vec<f64>,
}

impl JointSample {
    pub fn new(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 || data.len() % dim != 0 {
            return Err(LppError::invalid(format!("{} values do not split into rows of {dim}", data.len())));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(LppError::invalid("joint sample contains non-finite values"));
        }
        Ok(JointSample { dim, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != dim) {
            return Err(LppError::invalid("joint sample rows differ in length"));
        }
        JointSample::new(dim, rows.concat())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }
}

/// Outcome of one named check.
///
/// Bound-type checks pass when `statistic <= threshold`. Permutation tests carry a `p_value` and
/// pass when `p_value >= threshold`, the threshold then being the significance level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub name: String,
    pub statistic: f64,
    pub threshold: f64,
    pub p_value: Option<f64>,
    pub pass: bool,
    pub n: Vec<usize>,
    pub seed: Option<u64>,
    pub runtime_ms: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl TestReport {
    pub fn bound(name: impl Into<String>, statistic: f64, threshold: f64, n: Vec<usize>) -> Self {
        TestReport {
            name: name.into(),
            statistic,
            threshold,
            p_value: None,
            pass: statistic <= threshold,
            n,
            seed: None,
            runtime_ms: 0,
            detail: None,
        }
    }

    pub fn permutation(
        name: impl Into<String>,
        statistic: f64,
        p_value: f64,
        significance: f64,
        n: Vec<usize>,
    ) -> Self {
        TestReport {
            name: name.into(),
            statistic,
            threshold: significance,
            p_value: Some(p_value),
            pass: p_value >= significance,
            n,
            seed: None,
            runtime_ms: 0,
            detail: None,
        }
    }

    /// Bound-type report that passes exactly when `ok` holds.
    pub fn flag(name: impl Into<String>, ok: bool, n: Vec<usize>) -> Self {
        let mut r = TestReport::bound(name, if ok { 0.0 } else { 1.0 }, 0.0, n);
        r.pass = ok;
        r
    }

    pub fn with_threshold(mut self, threshold: f64) -> Self {
        self.threshold = threshold;
        self.pass = match self.p_value {
            Some(p) => p >= threshold,
            None => self.statistic <= threshold,
        };
        self
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }

    pub fn timed(mut self, since: Instant) -> Self {
        self.runtime_ms = since.elapsed().as_millis() as u64;
        self
    }

    /// `PASS name: statistic ... threshold ...`.
    pub fn summary_line(&self) -> String {
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        match self.p_value {
            Some(p) => format!(
                "{verdict} {}: stat={:.6} p={:.4} (>= {}) n={:?}",
                self.name, self.statistic, p, self.threshold, self.n
            ),
            None => format!(
                "{verdict} {}: stat={:.6} (<= {:.6}) n={:?}",
                self.name, self.statistic, self.threshold, self.n
            ),
        }
    }
}

/// Sample Pearson correlation; 0 when either input is constant.
pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    if sxx == 0.0 || syy == 0.0 {
        0.0
    } else {
        sxy / (sxx * syy).sqrt()
    }
}

/// `(1 + #{perm >= observed}) / (1 + B)` over `B` permutation statistics.
pub(crate) fn permutation_p_value(observed: f64, permuted: &[f64]) -> f64 {
    let hits = permuted.iter().filter(|&&s| s >= observed).count();
    (1 + hits) as f64 / (1 + permuted.len()) as f64
}

/// Map `f` over `0..count`, in parallel when the `parallel` feature is on. Output order is the
/// index order either way.
pub(crate) fn map_indices<T: Send>(count: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..count).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..count).map(f).collect()
    }
}
