//! Two-row unused-service coupling, its queueing form, and rate permutations built from it.

use std::fmt;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{LppError, Result};
use crate::lattice::{GridPoint, WeightGrid};

/// Columns kept away from the left edge when reading distributional statistics.
pub const DEFAULT_BURN_IN: usize = 64;
/// Minimisers closer than this to the left edge are flagged as boundary-affected.
pub const DEFAULT_GUARD: usize = 8;

/// Two adjacent rows over columns `s_min ..= s_max`; `row1` is the lower one.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoRowStrip {
    s_min: usize,
    row1: Vec<f64>,
    row2: Vec<f64>,
}

impl TwoRowStrip {
    pub fn new(s_min: usize, row1: Vec<f64>, row2: Vec<f64>) -> Result<Self> {
        if row1.len() != row2.len() || row1.is_empty() {
            return Err(LppError::invalid("strip rows must be non-empty and of equal length"));
        }
        if row1.iter().chain(&row2).any(|v| !v.is_finite()) {
            return Err(LppError::invalid("strip weights must be finite"));
        }
        Ok(TwoRowStrip { s_min, row1, row2 })
    }

    pub fn len(&self) -> usize {
        self.row1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.row1.is_empty()
    }

    pub fn s_min(&self) -> usize {
        self.s_min
    }

    pub fn s_max(&self) -> usize {
        self.s_min + self.len() - 1
    }

    /// Service times `S_t`.
    pub fn row1(&self) -> &[f64] {
        &self.row1
    }

    /// Arrival gaps `A_t`.
    pub fn row2(&self) -> &[f64] {
        &self.row2
    }

    /// Rows `row, row + 1` of a grid.
    pub fn from_grid(w: &WeightGrid, row: usize) -> Result<Self> {
        let b = w.bounds();
        if row < b.lo().row || row >= b.hi().row {
            return Err(LppError::invalid(format!("rows {row}, {} are not both in {b}", row + 1)));
        }
        TwoRowStrip::new(b.lo().col, w.row(row).to_vec(), w.row(row + 1).to_vec())
    }

    /// The strip as a grid on `[s_min, s_max] x [1, 2]`.
    pub fn to_grid(&self) -> WeightGrid {
        let bounds = crate::lattice::GridBox::new(
            GridPoint::new(self.s_min, 1),
            GridPoint::new(self.s_max(), 2),
        )
        .expect("s_min >= 1");
        WeightGrid::from_rows(bounds, &[self.row1.clone(), self.row2.clone()]).expect("finite")
    }

    /// Half-turn: reverse the column order and exchange the rows.
    pub fn reflect(&self) -> TwoRowStrip {
        let rev = |v: &[f64]| v.iter().rev().copied().collect::<Vec<_>>();
        TwoRowStrip { s_min: self.s_min, row1: rev(&self.row2), row2: rev(&self.row1) }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,row1,row2\n");
        for (n, (a, b)) in self.row1.iter().zip(&self.row2).enumerate() {
            writeln!(out, "{},{a},{b}", self.s_min + n).unwrap();
        }
        out
    }
}

/// `c_t = row1_{t+1} - row2_t` for `t` in `s_min .. s_max`.
pub fn diag_diffs(strip: &TwoRowStrip) -> Result<Vec<f64>> {
    if strip.len() < 2 {
        return Err(LppError::invalid("diagonal differences need at least two columns"));
    }
    Ok(strip.row1[1..].iter().zip(&strip.row2).map(|(s, a)| s - a).collect())
}

/// Unused service `U_t = (min_{s_min <= s < t} Σ_{i=s}^{t-1} c_i)_+`, with `U_{s_min} = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnusedService {
    pub s_min: usize,
    pub values: Vec<f64>,
    /// Column `s` attaining the minimum (latest one on ties); `None` at `s_min`.
    pub minimizer: Vec<Option<usize>>,
    /// Minimiser within the guard margin of the left edge.
    pub boundary: Vec<bool>,
}

pub fn unused_service(strip: &TwoRowStrip) -> UnusedService {
    unused_service_with_guard(strip, DEFAULT_GUARD)
}

pub fn unused_service_with_guard(strip: &TwoRowStrip, guard: usize) -> UnusedService {
    let n = strip.len();
    let s_min = strip.s_min;
    let mut values = vec![0.0; n];
    let mut minimizer = vec![None; n];
    // m = min_{s < t} Σ_{s}^{t-1} c, updated by m_{t+1} = c_t + min(0, m_t)
    let mut m = f64::NAN;
    let mut arg = s_min;
    for t in 1..n {
        let c = strip.row1[t] - strip.row2[t - 1];
        if t == 1 || m >= 0.0 {
            m = c;
            arg = s_min + t - 1;
        } else {
            m += c;
        }
        values[t] = m.max(0.0);
        minimizer[t] = Some(arg);
    }
    let boundary = minimizer.iter().map(|s| s.is_some_and(|s| s < s_min + guard)).collect();
    UnusedService { s_min, values, minimizer, boundary }
}

/// `row1* = row1 - U`, `row2* = row2 + U`.
pub fn two_row_swap(strip: &TwoRowStrip) -> TwoRowStrip {
    let u = unused_service(strip).values;
    TwoRowStrip {
        s_min: strip.s_min,
        row1: strip.row1.iter().zip(&u).map(|(s, u)| s - u).collect(),
        row2: strip.row2.iter().zip(&u).map(|(a, u)| a + u).collect(),
    }
}

/// [`two_row_swap`] for a strip whose rows carry row parameters `b1` (lower) and `b2` (upper):
/// the transform exchanges the two parameters in law only when `b2 > b1`.
pub fn two_row_swap_rates(strip: &TwoRowStrip, b1: f64, b2: f64) -> Result<TwoRowStrip> {
    if !(b2 > b1) {
        return Err(LppError::invalid(format!(
            "the two-row transform needs b2 > b1, got b1={b1}, b2={b2}"
        )));
    }
    Ok(two_row_swap(strip))
}

/// Queue with service `S = row1` and arrivals `A = row2`.
#[derive(Debug, Clone, PartialEq)]
pub struct QueueTrace {
    pub s_min: usize,
    /// `Q_t` for `t = s_min ..= s_max + 1`.
    pub q: Vec<f64>,
    pub departures: Vec<f64>,
    pub unused: Vec<f64>,
    pub c: Vec<f64>,
    pub service: Vec<f64>,
    pub arrivals: Vec<f64>,
}

impl QueueTrace {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,S,A,Q,D,U,c\n");
        for n in 0..self.departures.len() {
            let c = self.c.get(n).map_or(String::new(), |c| c.to_string());
            writeln!(
                out,
                "{},{},{},{},{},{},{c}",
                self.s_min + n,
                self.service[n],
                self.arrivals[n],
                self.q[n],
                self.departures[n],
                self.unused[n]
            )
            .unwrap();
        }
        out
    }
}

/// `Q_{t+1} = (Q_t - S_t)_+ + A_t`, `D_t = min(S_t, Q_t)`, `U_t = S_t - D_t`.
pub fn queue_trace(strip: &TwoRowStrip, q_init: f64) -> Result<QueueTrace> {
    if !(q_init >= 0.0 && q_init.is_finite()) {
        return Err(LppError::invalid(format!("initial queue {q_init} must be finite and nonnegative")));
    }
    let n = strip.len();
    let mut q = Vec::with_capacity(n + 1);
    let mut departures = Vec::with_capacity(n);
    let mut unused = Vec::with_capacity(n);
    q.push(q_init);
    for t in 0..n {
        let (s, a, qt) = (strip.row1[t], strip.row2[t], q[t]);
        let d = s.min(qt);
        departures.push(d);
        unused.push(s - d);
        q.push((qt - s).max(0.0) + a);
    }
    let c = if n >= 2 { diag_diffs(strip)? } else { Vec::new() };
    Ok(QueueTrace {
        s_min: strip.s_min,
        q,
        departures,
        unused,
        c,
        service: strip.row1.clone(),
        arrivals: strip.row2.clone(),
    })
}

/// Bijection of the integers that moves only finitely many points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinitePermutation {
    start: i64,
    images: Vec<i64>,
    swaps: Vec<i64>,
}

impl FinitePermutation {
    pub fn identity() -> Self {
        FinitePermutation { start: 0, images: Vec::new(), swaps: Vec::new() }
    }

    /// `images[n]` is the image of `start + n`; the images must be a rearrangement of the window.
    pub fn from_images(start: i64, images: Vec<i64>) -> Result<Self> {
        let len = images.len() as i64;
        let mut seen = vec![false; images.len()];
        for &v in &images {
            let k = v - start;
            if !(0..len).contains(&k) || seen[k as usize] {
                return Err(LppError::invalid(format!(
                    "{images:?} is not a permutation of {start}..{}",
                    start + len
                )));
            }
            seen[k as usize] = true;
        }
        let swaps = adjacent_decomposition(start, &images);
        Ok(FinitePermutation { start, images, swaps })
    }

    pub fn transposition(a: i64, b: i64) -> Self {
        if a == b {
            return Self::identity();
        }
        let (lo, hi) = (a.min(b), a.max(b));
        let mut images: Vec<i64> = (lo..=hi).collect();
        images[0] = hi;
        *images.last_mut().unwrap() = lo;
        Self::from_images(lo, images).expect("valid transposition")
    }

    pub fn apply(&self, i: i64) -> i64 {
        let k = i - self.start;
        if (0..self.images.len() as i64).contains(&k) {
            self.images[k as usize]
        } else {
            i
        }
    }

    pub fn is_identity(&self) -> bool {
        self.swaps.is_empty()
    }

    /// Smallest and largest moved points.
    pub fn support(&self) -> Option<(i64, i64)> {
        let moved: Vec<i64> = self.window().filter(|&i| self.apply(i) != i).collect();
        Some((*moved.first()?, *moved.last()?))
    }

    fn window(&self) -> std::ops::Range<i64> {
        self.start..self.start + self.images.len() as i64
    }

    /// Adjacent transpositions `(r, r+1)`, in order of application, that carry the entry at
    /// position `j` to `self.apply(j)` when applied to a sequence indexed by position.
    pub fn adjacent_transpositions(&self) -> &[i64] {
        &self.swaps
    }

    /// `σ(Z_{<x}) = Z_{<x}`.
    pub fn preserves_below(&self, x: i64) -> bool {
        self.window().filter(|&i| i < x).all(|i| self.apply(i) < x)
    }

    /// `σ(Z_{>y}) = Z_{>y}`.
    pub fn preserves_above(&self, y: i64) -> bool {
        self.window().filter(|&i| i > y).all(|i| self.apply(i) > y)
    }
}

/// Bubble the required entry into each position from the left; every swap undoes one inversion,
/// so no swap ever crosses a cut the permutation preserves.
fn adjacent_decomposition(start: i64, images: &[i64]) -> Vec<i64> {
    let mut cur: Vec<i64> = (start..start + images.len() as i64).collect();
    let mut swaps = Vec::new();
    for p in 0..images.len() {
        let q = p + cur[p..].iter().position(|&v| v == images[p]).unwrap();
        for s in (p..q).rev() {
            cur.swap(s, s + 1);
            swaps.push(start + s as i64);
        }
    }
    swaps
}

/// Endpoints `x <= y` of a protected passage time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EndpointPair {
    x: GridPoint,
    y: GridPoint,
}

impl EndpointPair {
    pub fn new(x: GridPoint, y: GridPoint) -> Result<Self> {
        if !(x <= y) {
            return Err(LppError::NotOrdered { lower: x, upper: y });
        }
        Ok(EndpointPair { x, y })
    }

    pub fn x(&self) -> GridPoint {
        self.x
    }

    pub fn y(&self) -> GridPoint {
        self.y
    }

    pub fn transpose(&self) -> EndpointPair {
        EndpointPair { x: self.x.transpose(), y: self.y.transpose() }
    }
}

impl fmt::Display for EndpointPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.x, self.y)
    }
}

/// Whether `L_{x,y}` keeps its law when column rates are permuted by `σ` and row rates by `τ`.
pub fn is_admissible(sigma: &FinitePermutation, tau: &FinitePermutation, pair: &EndpointPair) -> bool {
    let (x, y) = (pair.x, pair.y);
    sigma.preserves_below(x.col as i64)
        && sigma.preserves_above(y.col as i64)
        && tau.preserves_below(x.row as i64)
        && tau.preserves_above(y.row as i64)
}

/// Couple `w` (row parameters `b`, indexed from the grid's bottom row) to an environment whose
/// row parameters are `b_{τ(j)}`, keeping every protected passage time unchanged.
///
/// Returns the new grid and the permuted row parameters. Each adjacent transposition `(r, r+1)`
/// applies the two-row transform to rows `r, r+1`, on the half-turned strip when the lower row
/// has the larger parameter, and leaves the rows alone when the parameters agree.
pub fn permute_row_rates(
    w: &WeightGrid,
    b: &[f64],
    tau: &FinitePermutation,
    protected: &[EndpointPair],
) -> Result<(WeightGrid, Vec<f64>)> {
    let bounds = w.bounds();
    if b.len() != bounds.height() {
        return Err(LppError::invalid(format!(
            "{} row parameters for a grid of height {}",
            b.len(),
            bounds.height()
        )));
    }
    if let Some((lo, hi)) = tau.support() {
        if lo < bounds.lo().row as i64 || hi > bounds.hi().row as i64 {
            return Err(LppError::invalid(format!(
                "row permutation moves rows {lo}..={hi} outside {bounds}"
            )));
        }
    }
    for &r in tau.adjacent_transpositions() {
        if let Some(pair) = protected
            .iter()
            .find(|p| p.x.row as i64 == r + 1 || p.y.row as i64 == r)
        {
            return Err(LppError::ProtectedConflict { pair: pair.to_string(), row: r });
        }
    }
    let mut grid = w.clone();
    let mut rates = b.to_vec();
    let base = bounds.lo().row;
    for &r in tau.adjacent_transpositions() {
        let r = r as usize;
        let (lower, upper) = (rates[r - base], rates[r + 1 - base]);
        if lower != upper {
            let strip = TwoRowStrip::from_grid(&grid, r)?;
            let swapped = if upper > lower {
                two_row_swap_rates(&strip, lower, upper)?
            } else {
                two_row_swap_rates(&strip.reflect(), upper, lower)?.reflect()
            };
            grid.row_mut(r).copy_from_slice(&swapped.row1);
            grid.row_mut(r + 1).copy_from_slice(&swapped.row2);
        }
        rates.swap(r - base, r + 1 - base);
    }
    Ok((grid, rates))
}

/// Column version of [`permute_row_rates`], by transposition.
pub fn permute_column_rates(
    w: &WeightGrid,
    a: &[f64],
    sigma: &FinitePermutation,
    protected: &[EndpointPair],
) -> Result<(WeightGrid, Vec<f64>)> {
    let flipped: Vec<EndpointPair> = protected.iter().map(EndpointPair::transpose).collect();
    let (t, rates) = permute_row_rates(&w.transpose(), a, sigma, &flipped)?;
    Ok((t.transpose(), rates))
}

/// Columns by `σ`, then rows by `τ`.
pub fn permute_rates(
    w: &WeightGrid,
    a: &[f64],
    b: &[f64],
    sigma: &FinitePermutation,
    tau: &FinitePermutation,
    protected: &[EndpointPair],
) -> Result<(WeightGrid, Vec<f64>, Vec<f64>)> {
    let (cols, a2) = permute_column_rates(w, a, sigma, protected)?;
    let (both, b2) = permute_row_rates(&cols, b, tau, protected)?;
    Ok((both, a2, b2))
}
