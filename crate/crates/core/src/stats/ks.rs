use super::{Sample, TestReport, KS_CRITICAL_001};
use crate::error::{LppError, Result};

/// Values with `|x| < ATOM_EPS` count as the atom at zero.
pub const ATOM_EPS: f64 = 1e-9;

/// Two-sided normal quantile at α = 0.001.
const Z_001: f64 = 3.2905;

pub fn exp_cdf(x: f64, rate: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -(-rate * x).exp_m1()
    }
}

/// `sup_x |F_n(x) - F(x)|` for a continuous reference CDF.
pub fn ks_one_sample(sample: &Sample, cdf: impl Fn(f64) -> f64) -> f64 {
    let sorted = sample.sorted();
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i + 1) as f64 / n - f).max(f - i as f64 / n);
    }
    d
}

/// KS distance to `Exp(rate)`, threshold `1.95 / √n`.
pub fn ks_one_sample_exp(sample: &Sample, rate: f64) -> Result<TestReport> {
    if !(rate > 0.0 && rate.is_finite()) {
        return Err(LppError::invalid(format!("exponential rate {rate} must be positive")));
    }
    if sample.is_empty() {
        return Err(LppError::invalid("KS test on an empty sample"));
    }
    let n = sample.len();
    let d = ks_one_sample(sample, |x| exp_cdf(x, rate));
    Ok(TestReport::bound(format!("ks-exp(rate={rate})"), d, KS_CRITICAL_001 / (n as f64).sqrt(), vec![n]))
}

/// Two-sample KS distance, threshold `1.95 √((n + m) / (n m))`.
pub fn ks_two_sample(a: &Sample, b: &Sample) -> Result<TestReport> {
    if a.is_empty() || b.is_empty() {
        return Err(LppError::invalid("KS test on an empty sample"));
    }
    let (x, y) = (a.sorted(), b.sorted());
    let (n, m) = (x.len(), y.len());
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < n && j < m {
        let t = x[i].min(y[j]);
        while i < n && x[i] <= t {
            i += 1;
        }
        while j < m && y[j] <= t {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let threshold = KS_CRITICAL_001 * (((n + m) as f64) / (n as f64 * m as f64)).sqrt();
    Ok(TestReport::bound("ks-two-sample", d, threshold, vec![n, m]))
}

/// Atom-at-zero plus exponential-tail test.
#[derive(Debug, Clone)]
pub struct AtomTailReport {
    /// `|atom fraction - atom_mass|` against a tolerance.
    pub atom: TestReport,
    /// KS of the positive part against `Exp(tail_rate)`; `None` when `atom_mass = 1` and the tail
    /// is empty.
    pub tail: Option<TestReport>,
    pub atom_count: usize,
    pub tail_count: usize,
}

impl AtomTailReport {
    pub fn pass(&self) -> bool {
        self.atom.pass && self.tail.as_ref().is_none_or(|t| t.pass)
    }

    pub fn with_thresholds(mut self, atom_tolerance: f64, tail_ks: f64) -> Self {
        self.atom = self.atom.with_threshold(atom_tolerance);
        self.tail = self.tail.map(|t| t.with_threshold(tail_ks));
        self
    }

    /// Single report that passes iff both parts pass.
    pub fn combined(&self, name: impl Into<String>) -> TestReport {
        let mut r = self.atom.clone().with_name(name);
        r.pass = self.pass();
        r.detail = Some(match &self.tail {
            Some(t) => format!(
                "atom {}/{} dev={:.5} tol={:.5}; tail KS={:.5} tol={:.5}",
                self.atom_count,
                self.atom_count + self.tail_count,
                self.atom.statistic,
                self.atom.threshold,
                t.statistic,
                t.threshold
            ),
            None => format!("atom {}/{}; empty tail", self.atom_count, self.atom_count + self.tail_count),
        });
        r
    }
}

/// Split at `|x| < 1e-9`. The atom fraction is compared with `atom_mass` using a normal
/// approximation (default tolerance `3.29 σ`), the positive part by KS against `Exp(tail_rate)`.
pub fn atom_tail_test(sample: &Sample, atom_mass: f64, tail_rate: f64) -> Result<AtomTailReport> {
    if !(atom_mass > 0.0 && atom_mass <= 1.0) {
        return Err(LppError::invalid(format!("atom mass {atom_mass} must lie in (0, 1]")));
    }
    if sample.is_empty() {
        return Err(LppError::invalid("atom/tail test on an empty sample"));
    }
    if let Some(v) = sample.values().iter().find(|&&v| v <= -ATOM_EPS) {
        return Err(LppError::invalid(format!("negative value {v} in a nonnegative sample")));
    }
    let n = sample.len();
    let tail: Vec<f64> = sample.values().iter().copied().filter(|v| v.abs() >= ATOM_EPS).collect();
    let atom_count = n - tail.len();
    let frac = atom_count as f64 / n as f64;
    let sd = (atom_mass * (1.0 - atom_mass) / n as f64).sqrt();
    let atom = TestReport::bound("atom-fraction", (frac - atom_mass).abs(), Z_001 * sd, vec![n]);
    let tail_count = tail.len();
    let tail_report = if tail.is_empty() {
        if atom_mass < 1.0 {
            Some(
                TestReport::flag("tail-ks", false, vec![0])
                    .with_detail("no positive values although the atom mass is below 1"),
            )
        } else {
            None
        }
    } else {
        Some(ks_one_sample_exp(&Sample::new(tail)?, tail_rate)?.with_name("tail-ks"))
    };
    Ok(AtomTailReport { atom, tail: tail_report, atom_count, tail_count })
}
