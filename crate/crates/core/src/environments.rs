//! Random weight fields: i.i.d. exponentials, inhomogeneous rates, the η-environment and the
//! column/row-modified environments.

use serde::{Deserialize, Serialize};

use crate::busemann::{zeta, DirectionSet};
use crate::error::{LppError, Result};
use crate::lattice::{GridBox, GridPoint, WeightGrid};
use crate::rng::RngStream;

/// Column parameters `a_i` and row parameters `b_j`, 1-based.
///
/// Lookups past the end of either sequence repeat its last entry, so a profile describes an
/// environment on the whole quadrant with constant tails.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawProfile")]
pub struct RateProfile {
    a: Vec<f64>,
    b: Vec<f64>,
}

#[derive(Deserialize)]
struct RawProfile {
    a: Vec<f64>,
    b: Vec<f64>,
}

impl TryFrom<RawProfile> for RateProfile {
    type Error = LppError;
    fn try_from(raw: RawProfile) -> Result<Self> {
        RateProfile::new(raw.a, raw.b)
    }
}

impl RateProfile {
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if a.is_empty() || b.is_empty() {
            return Err(LppError::invalid("rate sequences must be non-empty"));
        }
        if a.iter().chain(&b).any(|v| !v.is_finite()) {
            return Err(LppError::invalid("rate parameters must be finite"));
        }
        Ok(RateProfile { a, b })
    }

    /// `a ≡ 0`, `b ≡ 1`: the i.i.d. Exp(1) environment.
    pub fn homogeneous() -> Self {
        RateProfile { a: vec![0.0], b: vec![1.0] }
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn a_at(&self, col: usize) -> f64 {
        assert!(col >= 1);
        self.a[(col - 1).min(self.a.len() - 1)]
    }

    pub fn b_at(&self, row: usize) -> f64 {
        assert!(row >= 1);
        self.b[(row - 1).min(self.b.len() - 1)]
    }

    pub fn rate(&self, p: GridPoint) -> f64 {
        self.a_at(p.col) + self.b_at(p.row)
    }

    /// Column parameters over `1..=cols` (tail-extended).
    pub fn a_upto(&self, cols: usize) -> Vec<f64> {
        (1..=cols).map(|i| self.a_at(i)).collect()
    }

    pub fn b_upto(&self, rows: usize) -> Vec<f64> {
        (1..=rows).map(|j| self.b_at(j)).collect()
    }

    /// Profile with explicitly listed parameters only (no tail beyond the given lengths needed).
    pub fn permuted(&self, cols: &[usize], rows: &[usize]) -> RateProfile {
        RateProfile {
            a: cols.iter().map(|&i| self.a_at(i)).collect(),
            b: rows.iter().map(|&j| self.b_at(j)).collect(),
        }
    }
}

/// Parameters of the η-environment: corner `(k, ℓ)`, `d` directions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawEta")]
pub struct EtaSpec {
    k: usize,
    l: usize,
    directions: DirectionSet,
}

#[derive(Deserialize)]
struct RawEta {
    k: usize,
    l: usize,
    r: Vec<f64>,
}

impl TryFrom<RawEta> for EtaSpec {
    type Error = LppError;
    fn try_from(raw: RawEta) -> Result<Self> {
        EtaSpec::new(raw.k, raw.l, raw.r)
    }
}

impl EtaSpec {
    pub fn new(k: usize, l: usize, r: Vec<f64>) -> Result<Self> {
        if k == 0 || l == 0 {
            return Err(LppError::invalid("k and l must be positive"));
        }
        Ok(EtaSpec { k, l, directions: DirectionSet::new(r)? })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn d(&self) -> usize {
        self.directions.len()
    }

    pub fn directions(&self) -> &DirectionSet {
        &self.directions
    }

    /// `[k + d - 1] x [ℓ + d - 1]`.
    pub fn grid_box(&self) -> GridBox {
        GridBox::with_size(self.k + self.d() - 1, self.l + self.d() - 1).expect("positive sizes")
    }

    /// Antidiagonal terminal `z_p = (k + p - 1, ℓ + d - p)`, `p` in `1..=d`.
    pub fn terminal(&self, p: usize) -> GridPoint {
        assert!((1..=self.d()).contains(&p));
        GridPoint::new(self.k + p - 1, self.l + self.d() - p)
    }

    /// Cells whose rate `a_i + b_j` is not positive and which therefore carry weight 0.
    pub fn is_zero_cell(&self, p: GridPoint) -> bool {
        p.col >= self.k && p.row >= self.l && p.col + p.row >= self.k + self.l + self.d() - 1
    }
}

/// The η rates: `a_i = 0` for `i < k`, `-ζ(r_{i-k+1})` after; `b_j = 1` for `j < ℓ`,
/// `ζ(r_{ℓ+d-j})` after.
pub fn build_eta_rates(spec: &EtaSpec) -> RateProfile {
    let (k, l, d) = (spec.k, spec.l, spec.d());
    let z = spec.directions.zetas();
    let a = (1..k + d).map(|i| if i < k { 0.0 } else { -z[i - k] }).collect();
    let b = (1..l + d).map(|j| if j < l { 1.0 } else { z[l + d - j - 1] }).collect();
    RateProfile { a, b }
}

pub fn sample_iid_exp1(bounds: GridBox, rng: &RngStream) -> WeightGrid {
    WeightGrid::from_fn_unchecked(bounds, |p| rng.cell_exponential(p, 1.0))
}

/// Independent `Exp(a_i + b_j)` weights; every rate in the box must be positive.
pub fn sample_inhomogeneous(
    profile: &RateProfile,
    bounds: GridBox,
    rng: &RngStream,
) -> Result<WeightGrid> {
    check_rates(bounds, |p| profile.rate(p))?;
    Ok(WeightGrid::from_fn_unchecked(bounds, |p| rng.cell_exponential(p, profile.rate(p))))
}

fn check_rates(bounds: GridBox, rate: impl Fn(GridPoint) -> f64) -> Result<()> {
    match bounds.points().find(|&p| !(rate(p) > 0.0)) {
        Some(p) => Err(LppError::NonPositiveRate { point: p, rate: rate(p) }),
        None => Ok(()),
    }
}

pub fn sample_eta(spec: &EtaSpec, rng: &RngStream) -> WeightGrid {
    let profile = build_eta_rates(spec);
    WeightGrid::from_fn_unchecked(spec.grid_box(), |p| {
        if spec.is_zero_cell(p) {
            0.0
        } else {
            rng.cell_exponential(p, profile.rate(p))
        }
    })
}

/// Rate `1 - ζ(r_p)` on column `k_p`, 1 elsewhere. `columns` must increase strictly.
pub fn sample_column_modified(
    columns: &[usize],
    r: &[f64],
    bounds: GridBox,
    rng: &RngStream,
) -> Result<WeightGrid> {
    let rates = modified_rates(columns, r, |w| w.windows(2).all(|p| p[0] < p[1]), |z| 1.0 - z)?;
    Ok(WeightGrid::from_fn_unchecked(bounds, |p| {
        rng.cell_exponential(p, lookup(&rates, p.col))
    }))
}

/// Rate `ζ(r_p)` on row `s_p`, 1 elsewhere. `rows` must decrease strictly.
pub fn sample_row_modified(
    rows: &[usize],
    r: &[f64],
    bounds: GridBox,
    rng: &RngStream,
) -> Result<WeightGrid> {
    let rates = modified_rates(rows, r, |w| w.windows(2).all(|p| p[0] > p[1]), |z| z)?;
    Ok(WeightGrid::from_fn_unchecked(bounds, |p| {
        rng.cell_exponential(p, lookup(&rates, p.row))
    }))
}

fn modified_rates(
    lines: &[usize],
    r: &[f64],
    monotone: impl Fn(&[usize]) -> bool,
    rate_of: impl Fn(f64) -> f64,
) -> Result<Vec<(usize, f64)>> {
    if lines.len() != r.len() {
        return Err(LppError::invalid("one direction per modified line is required"));
    }
    if !monotone(lines) || lines.contains(&0) {
        return Err(LppError::invalid(format!("modified line indices {lines:?} are not strictly monotone")));
    }
    lines
        .iter()
        .zip(r)
        .map(|(&line, &rp)| {
            let z = zeta(rp)?;
            if !(z > 0.0 && z < 1.0) {
                return Err(LppError::invalid(format!("direction {rp} must be positive and finite")));
            }
            Ok((line, rate_of(z)))
        })
        .collect()
}

fn lookup(rates: &[(usize, f64)], line: usize) -> f64 {
    rates.iter().find(|(l, _)| *l == line).map_or(1.0, |(_, r)| *r)
}
