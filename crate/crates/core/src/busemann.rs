//! ζ, the exact Busemann sampler on the η-environment, prelimit approximations and thin
//! Busemann functions.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::environments::{sample_eta, sample_iid_exp1, sample_inhomogeneous, EtaSpec, RateProfile};
use crate::error::{LppError, Result};
use crate::lattice::{sweep_backward, GridBox, GridPoint, WeightGrid};
use crate::rng::RngStream;

/// `ζ(r) = √r / (1 + √r)`, with `ζ(0) = 0` and `ζ(∞) = 1`.
pub fn zeta(r: f64) -> Result<f64> {
    if r.is_nan() || r < 0.0 {
        return Err(LppError::invalid(format!("direction {r} must be nonnegative")));
    }
    if r.is_infinite() {
        return Ok(1.0);
    }
    let s = r.sqrt();
    Ok(s / (1.0 + s))
}

/// Strictly increasing positive finite directions with their ζ values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct DirectionSet {
    r: Vec<f64>,
    zeta: Vec<f64>,
}

impl TryFrom<Vec<f64>> for DirectionSet {
    type Error = LppError;
    fn try_from(r: Vec<f64>) -> Result<Self> {
        DirectionSet::new(r)
    }
}

impl From<DirectionSet> for Vec<f64> {
    fn from(d: DirectionSet) -> Self {
        d.r
    }
}

impl DirectionSet {
    pub fn new(r: Vec<f64>) -> Result<Self> {
        if r.is_empty() {
            return Err(LppError::invalid("at least one direction is required"));
        }
        if r.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
            return Err(LppError::invalid(format!("directions {r:?} must be positive and finite")));
        }
        if r.windows(2).any(|w| w[0] >= w[1]) {
            return Err(LppError::invalid(format!("directions {r:?} must increase strictly")));
        }
        let zeta = r.iter().map(|&x| zeta(x)).collect::<Result<_>>()?;
        Ok(DirectionSet { r, zeta })
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.r
    }

    pub fn zetas(&self) -> &[f64] {
        &self.zeta
    }
}

/// Increments over the edge sets `E→ = [k-1] x [ℓ]` (`I`) and `E↑ = [k] x [ℓ-1]` (`J`), one
/// value per direction.
#[derive(Debug, Clone, PartialEq)]
pub struct BusemannSample {
    k: usize,
    l: usize,
    d: usize,
    i: Vec<f64>,
    j: Vec<f64>,
}

impl BusemannSample {
    fn empty(k: usize, l: usize, d: usize) -> Self {
        BusemannSample {
            k,
            l,
            d,
            i: vec![f64::NAN; (k - 1) * l * d],
            j: vec![f64::NAN; k * (l - 1) * d],
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn d(&self) -> usize {
        self.d
    }

    fn i_index(&self, u: GridPoint, p: usize) -> Option<usize> {
        (u.col >= 1 && u.col < self.k && u.row >= 1 && u.row <= self.l && p >= 1 && p <= self.d)
            .then(|| ((u.row - 1) * (self.k - 1) + u.col - 1) * self.d + p - 1)
    }

    fn j_index(&self, v: GridPoint, p: usize) -> Option<usize> {
        (v.col >= 1 && v.col <= self.k && v.row >= 1 && v.row < self.l && p >= 1 && p <= self.d)
            .then(|| ((v.row - 1) * self.k + v.col - 1) * self.d + p - 1)
    }

    /// Horizontal increment at `u ∈ E→` for direction index `p` (1-based).
    pub fn horizontal(&self, u: GridPoint, p: usize) -> Option<f64> {
        self.i_index(u, p).map(|k| self.i[k])
    }

    /// Vertical increment at `v ∈ E↑` for direction index `p`.
    pub fn vertical(&self, v: GridPoint, p: usize) -> Option<f64> {
        self.j_index(v, p).map(|k| self.j[k])
    }

    pub fn horizontal_edges(&self) -> impl Iterator<Item = GridPoint> + '_ {
        (1..=self.l).flat_map(move |row| (1..self.k).map(move |col| GridPoint::new(col, row)))
    }

    pub fn vertical_edges(&self) -> impl Iterator<Item = GridPoint> + '_ {
        (1..self.l).flat_map(move |row| (1..=self.k).map(move |col| GridPoint::new(col, row)))
    }

    pub fn csv_header(&self) -> String {
        let mut cols = Vec::new();
        for u in self.horizontal_edges() {
            for p in 1..=self.d {
                cols.push(format!("I_{}_{}_p{p}", u.col, u.row));
            }
        }
        for v in self.vertical_edges() {
            for p in 1..=self.d {
                cols.push(format!("J_{}_{}_p{p}", v.col, v.row));
            }
        }
        cols.join(",")
    }

    /// Values in [`BusemannSample::csv_header`] order.
    pub fn flat_values(&self) -> Vec<f64> {
        self.i.iter().chain(&self.j).copied().collect()
    }

    pub fn csv_row(&self) -> String {
        let mut out = String::new();
        for (n, v) in self.flat_values().iter().enumerate() {
            if n > 0 {
                out.push(',');
            }
            write!(out, "{v}").unwrap();
        }
        out
    }
}

/// Fill a sample from passage times to the given terminals, one per direction. Only rows
/// `1..=ℓ` and columns `1..=k` of each passage table are inspected.
fn sample_from_grid(w: &WeightGrid, k: usize, l: usize, terminals: &[GridPoint]) -> BusemannSample {
    let d = terminals.len();
    let mut out = BusemannSample::empty(k, l, d);
    let mut rows = vec![vec![0.0; k]; l];
    for (pi, &z) in terminals.iter().enumerate() {
        debug_assert!(z.col >= k && z.row >= l);
        sweep_backward(w, GridPoint::new(1, 1), z, |row, vals| {
            if row <= l {
                rows[row - 1].copy_from_slice(&vals[..k]);
            }
        });
        let p = pi + 1;
        for row in 1..=l {
            for col in 1..k {
                let idx = out.i_index(GridPoint::new(col, row), p).unwrap();
                out.i[idx] = rows[row - 1][col - 1] - rows[row - 1][col];
            }
        }
        for row in 1..l {
            for col in 1..=k {
                let idx = out.j_index(GridPoint::new(col, row), p).unwrap();
                out.j[idx] = rows[row - 1][col - 1] - rows[row][col - 1];
            }
        }
    }
    out
}

/// Increments of the η-environment to the antidiagonal points `z_p`, jointly distributed as the
/// Busemann functions of the stationary Exp(1) model in directions `r_1 < ... < r_d`.
pub fn exact_busemann_sample(spec: &EtaSpec, rng: &RngStream) -> BusemannSample {
    let eta = sample_eta(spec, rng);
    let terminals: Vec<GridPoint> = (1..=spec.d()).map(|p| spec.terminal(p)).collect();
    sample_from_grid(&eta, spec.k(), spec.l(), &terminals)
}

/// Terminal columns `round(r_p n)`, pushed apart so consecutive ones differ by at least 2.
pub fn prelimit_terminals(k: usize, l: usize, r: &DirectionSet, n: usize) -> Result<Vec<GridPoint>> {
    if n < l {
        return Err(LppError::invalid(format!("height {n} is below the corner row {l}")));
    }
    let mut cols: Vec<usize> = Vec::with_capacity(r.len());
    for &rp in r.values() {
        let c = (rp * n as f64).round() as usize;
        if c < k {
            return Err(LppError::invalid(format!(
                "terminal column round({rp} * {n}) = {c} lies left of column {k}"
            )));
        }
        let c = match cols.last() {
            Some(&prev) => c.max(prev + 2),
            None => c,
        };
        cols.push(c);
    }
    Ok(cols.into_iter().map(|c| GridPoint::new(c, n)).collect())
}

/// Increments on `E→_{k,ℓ}`, `E↑_{k,ℓ}` of an i.i.d. Exp(1) grid towards `(round(r_p n), n)`.
pub fn prelimit_busemann_sample(
    k: usize,
    l: usize,
    r: &DirectionSet,
    n: usize,
    rng: &RngStream,
) -> Result<BusemannSample> {
    Ok(prelimit_busemann_heights(k, l, r, &[n], rng)?.remove(0))
}

/// Prelimit samples at several heights from one environment, so that nested boxes share
/// weights.
pub fn prelimit_busemann_heights(
    k: usize,
    l: usize,
    r: &DirectionSet,
    heights: &[usize],
    rng: &RngStream,
) -> Result<Vec<BusemannSample>> {
    if k < 1 || l < 1 || heights.is_empty() {
        return Err(LppError::invalid("k, l and the height list must be non-empty"));
    }
    let plans = heights
        .iter()
        .map(|&n| prelimit_terminals(k, l, r, n))
        .collect::<Result<Vec<_>>>()?;
    let cols = plans.iter().flatten().map(|z| z.col).max().unwrap();
    let rows = plans.iter().flatten().map(|z| z.row).max().unwrap();
    let grid = sample_iid_exp1(GridBox::with_size(cols, rows)?, rng);
    Ok(plans.iter().map(|t| sample_from_grid(&grid, k, l, t)).collect())
}

/// `P{I^r - I^s >= x}` for directions `r < s`: an atom `ζ(r)/ζ(s)` at 0 and an exponential tail.
pub fn increment_cdf_complement(r: f64, s: f64, x: f64) -> Result<f64> {
    if !(r > 0.0 && r < s) {
        return Err(LppError::invalid(format!("directions must satisfy 0 < r < s, got {r}, {s}")));
    }
    if !(x >= 0.0) {
        return Err(LppError::invalid(format!("threshold {x} must be nonnegative")));
    }
    let (zr, zs) = (zeta(r)?, zeta(s)?);
    let atom = if x == 0.0 { zr / zs } else { 0.0 };
    Ok(atom + (1.0 - zr / zs) * (-x * zr).exp())
}

/// `min{k' >= i : min a_{i:k'} = min a_{i:k}}` with 1-based indices.
pub fn recurrence_index(a: &[f64], i: usize, k: usize) -> Result<usize> {
    if i == 0 || i > k {
        return Err(LppError::invalid(format!("need 1 <= i <= k, got i={i}, k={k}")));
    }
    if k > a.len() {
        return Err(LppError::invalid(format!("index {k} beyond a sequence of length {}", a.len())));
    }
    let window = &a[i - 1..k];
    let min = window.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(i + window.iter().position(|&v| v == min).unwrap())
}

/// Line along which a thin Busemann limit is taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThinLine {
    /// Terminal `(k, n)` with `n → ∞`.
    Column(usize),
    /// Terminal `(m, ℓ)` with `m → ∞`.
    Row(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IncrementKind {
    I,
    J,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThinBusemannResult {
    pub value: f64,
    pub converged: bool,
    pub height_used: usize,
}

/// Thin Busemann value on a pre-sampled grid whose box starts at `(1, 1)`.
///
/// Along a column the prelimit `I_{u,(k,n)}` is nondecreasing and `J_{u,(k,n)}` nonincreasing in
/// `n`. The prelimit is evaluated at `h = max_height / 2` and `2h`; agreement to `1e-9` marks the
/// value as converged. Prelimits can sit on a plateau for many doublings before moving again, so
/// the comparison is made at the largest heights the grid allows rather than at the first
/// plateau. Rows are handled by transposition.
pub fn thin_busemann_on_grid(
    w: &WeightGrid,
    u: GridPoint,
    line: ThinLine,
    which: IncrementKind,
    max_height: usize,
) -> Result<ThinBusemannResult> {
    match line {
        ThinLine::Column(k) => thin_column(w, u, k, which, max_height),
        ThinLine::Row(l) => {
            let flipped = match which {
                IncrementKind::I => IncrementKind::J,
                IncrementKind::J => IncrementKind::I,
            };
            thin_column(&w.transpose(), u.transpose(), l, flipped, max_height)
        }
    }
}

fn thin_column(
    w: &WeightGrid,
    u: GridPoint,
    k: usize,
    which: IncrementKind,
    max_height: usize,
) -> Result<ThinBusemannResult> {
    let b = w.bounds();
    if b.lo() != GridPoint::new(1, 1) {
        return Err(LppError::invalid("thin Busemann grids must start at (1,1)"));
    }
    if u.col == 0 || u.row == 0 || u.col > k || (which == IncrementKind::I && u.col == k) {
        return Err(LppError::invalid(format!("{u} has no finite increment towards column {k}")));
    }
    if k > b.hi().col || max_height > b.hi().row {
        return Err(LppError::invalid(format!("grid {b} does not reach column {k}, height {max_height}")));
    }
    let h = max_height / 2;
    if h <= u.row {
        return Err(LppError::invalid(format!("max height {max_height} too small for {u}")));
    }
    let eval = |n: usize| {
        let mut here = 0.0f64;
        let mut next = 0.0;
        sweep_backward(w, u, GridPoint::new(k, n), |row, vals| {
            if row == u.row + 1 && which == IncrementKind::J {
                next = vals[0];
            }
            if row == u.row {
                here = vals[0];
                if which == IncrementKind::I {
                    next = vals[1];
                }
            }
        });
        here - next
    };
    let (half, full) = (eval(h), eval(max_height));
    Ok(ThinBusemannResult { value: full, converged: (full - half).abs() <= 1e-9, height_used: max_height })
}

/// Thin Busemann value in a fresh inhomogeneous environment on `[1, k] x [1, max_height]`
/// (columns) or `[1, max_height] x [1, ℓ]` (rows).
pub fn thin_busemann(
    profile: &RateProfile,
    u: GridPoint,
    line: ThinLine,
    which: IncrementKind,
    max_height: usize,
    rng: &RngStream,
) -> Result<ThinBusemannResult> {
    let bounds = match line {
        ThinLine::Column(k) => GridBox::with_size(k, max_height)?,
        ThinLine::Row(l) => GridBox::with_size(max_height, l)?,
    };
    let w = sample_inhomogeneous(profile, bounds, rng)?;
    thin_busemann_on_grid(&w, u, line, which, max_height)
}
