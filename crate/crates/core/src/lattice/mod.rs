//! Finite rectangular lattices and exact last-passage kernels.

mod csv;
mod passage;

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{LppError, Result};

pub use passage::{
    geodesic, increments_from_initial, increments_to_terminal, induced_weights, last_passage,
    passage_from_initial, passage_to_terminal, IncrementField, Orientation, PassageField,
    PassageMode,
};
pub(crate) use passage::sweep_backward;

/// Passage time between incomparable points.
pub const NEG_INF: f64 = f64::NEG_INFINITY;
/// Increment against an absent passage time (`real - NEG_INF`).
pub const POS_INF: f64 = f64::INFINITY;

/// Lattice site, 1-based: `col` is the horizontal coordinate, `row` the vertical one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridPoint {
    pub col: usize,
    pub row: usize,
}

impl GridPoint {
    pub const fn new(col: usize, row: usize) -> Self {
        GridPoint { col, row }
    }

    pub const fn right(self) -> Self {
        GridPoint { col: self.col + 1, row: self.row }
    }

    pub const fn up(self) -> Self {
        GridPoint { col: self.col, row: self.row + 1 }
    }

    pub fn left(self) -> Option<Self> {
        (self.col > 1).then(|| GridPoint { col: self.col - 1, row: self.row })
    }

    pub fn down(self) -> Option<Self> {
        (self.row > 1).then(|| GridPoint { col: self.col, row: self.row - 1 })
    }

    pub const fn transpose(self) -> Self {
        GridPoint { col: self.row, row: self.col }
    }
}

/// Componentwise order; incomparable points compare as `None`.
impl PartialOrd for GridPoint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self.col.cmp(&other.col), self.row.cmp(&other.row)) {
            (Ordering::Equal, Ordering::Equal) => Some(Ordering::Equal),
            (Ordering::Less | Ordering::Equal, Ordering::Less | Ordering::Equal) => {
                Some(Ordering::Less)
            }
            (Ordering::Greater | Ordering::Equal, Ordering::Greater | Ordering::Equal) => {
                Some(Ordering::Greater)
            }
            _ => None,
        }
    }
}

impl fmt::Display for GridPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.col, self.row)
    }
}

/// Closed rectangle `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawBox")]
pub struct GridBox {
    lo: GridPoint,
    hi: GridPoint,
}

#[derive(Deserialize)]
struct RawBox {
    lo: GridPoint,
    hi: GridPoint,
}

impl TryFrom<RawBox> for GridBox {
    type Error = LppError;
    fn try_from(raw: RawBox) -> Result<Self> {
        GridBox::new(raw.lo, raw.hi)
    }
}

impl GridBox {
    pub fn new(lo: GridPoint, hi: GridPoint) -> Result<Self> {
        if lo.col == 0 || lo.row == 0 {
            return Err(LppError::invalid(format!("coordinates are 1-based, got {lo}")));
        }
        if !(lo <= hi) {
            return Err(LppError::NotOrdered { lower: lo, upper: hi });
        }
        Ok(GridBox { lo, hi })
    }

    /// `[1, cols] x [1, rows]`.
    pub fn with_size(cols: usize, rows: usize) -> Result<Self> {
        if cols == 0 || rows == 0 {
            return Err(LppError::invalid("grid dimensions must be positive"));
        }
        Ok(GridBox { lo: GridPoint::new(1, 1), hi: GridPoint::new(cols, rows) })
    }

    pub fn lo(&self) -> GridPoint {
        self.lo
    }

    pub fn hi(&self) -> GridPoint {
        self.hi
    }

    pub fn width(&self) -> usize {
        self.hi.col - self.lo.col + 1
    }

    pub fn height(&self) -> usize {
        self.hi.row - self.lo.row + 1
    }

    pub fn area(&self) -> usize {
        self.width() * self.height()
    }

    pub fn contains(&self, p: GridPoint) -> bool {
        self.lo <= p && p <= self.hi
    }

    pub fn check(&self, p: GridPoint) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(LppError::OutOfBox { point: p, bounds: *self })
        }
    }

    #[inline]
    pub(crate) fn index(&self, p: GridPoint) -> usize {
        (p.row - self.lo.row) * self.width() + (p.col - self.lo.col)
    }

    /// Points in row-major order, bottom row first.
    pub fn points(&self) -> impl Iterator<Item = GridPoint> + '_ {
        (self.lo.row..=self.hi.row)
            .flat_map(move |row| (self.lo.col..=self.hi.col).map(move |col| GridPoint { col, row }))
    }

    pub fn transpose(&self) -> GridBox {
        GridBox { lo: self.lo.transpose(), hi: self.hi.transpose() }
    }
}

impl fmt::Display for GridBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Dense field of finite weights on a box.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightGrid {
    bounds: GridBox,
    values: Vec<f64>,
}

impl WeightGrid {
    /// Takes weights in row-major order, bottom row first.
    pub fn from_row_major(bounds: GridBox, values: Vec<f64>) -> Result<Self> {
        if values.len() != bounds.area() {
            return Err(LppError::invalid(format!(
                "{} weights supplied for a box of area {}",
                values.len(),
                bounds.area()
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            let p = GridPoint::new(bounds.lo.col + k % bounds.width(), bounds.lo.row + k / bounds.width());
            return Err(LppError::invalid(format!("weight at {p} is not finite")));
        }
        Ok(WeightGrid { bounds, values })
    }

    /// `rows[0]` is the bottom row.
    pub fn from_rows(bounds: GridBox, rows: &[Vec<f64>]) -> Result<Self> {
        if rows.len() != bounds.height() || rows.iter().any(|r| r.len() != bounds.width()) {
            return Err(LppError::invalid("row table does not match the box"));
        }
        Self::from_row_major(bounds, rows.concat())
    }

    pub fn from_fn(bounds: GridBox, mut f: impl FnMut(GridPoint) -> f64) -> Result<Self> {
        let values = bounds.points().map(&mut f).collect();
        Self::from_row_major(bounds, values)
    }

    pub(crate) fn from_fn_unchecked(bounds: GridBox, f: impl FnMut(GridPoint) -> f64) -> Self {
        let values: Vec<f64> = bounds.points().map(f).collect();
        debug_assert!(values.iter().all(|v| v.is_finite()));
        WeightGrid { bounds, values }
    }

    pub fn bounds(&self) -> GridBox {
        self.bounds
    }

    pub fn get(&self, p: GridPoint) -> Option<f64> {
        self.bounds.contains(p).then(|| self.values[self.bounds.index(p)])
    }

    /// Panics outside the box.
    #[inline]
    pub fn at(&self, p: GridPoint) -> f64 {
        assert!(self.bounds.contains(p), "{p} outside {}", self.bounds);
        self.values[self.bounds.index(p)]
    }

    pub fn set(&mut self, p: GridPoint, value: f64) -> Result<()> {
        self.bounds.check(p)?;
        if !value.is_finite() {
            return Err(LppError::invalid(format!("weight at {p} is not finite")));
        }
        let k = self.bounds.index(p);
        self.values[k] = value;
        Ok(())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Weights of lattice row `row`, left to right.
    pub fn row(&self, row: usize) -> &[f64] {
        assert!((self.bounds.lo.row..=self.bounds.hi.row).contains(&row));
        let w = self.bounds.width();
        let start = (row - self.bounds.lo.row) * w;
        &self.values[start..start + w]
    }

    pub(crate) fn row_mut(&mut self, row: usize) -> &mut [f64] {
        let w = self.bounds.width();
        let start = (row - self.bounds.lo.row) * w;
        &mut self.values[start..start + w]
    }

    /// Swap the two axes.
    pub fn transpose(&self) -> WeightGrid {
        let tb = self.bounds.transpose();
        WeightGrid::from_fn_unchecked(tb, |p| self.at(p.transpose()))
    }

    /// Rotation by a half turn within the same box: `(c, r) -> (lo.c + hi.c - c, lo.r + hi.r - r)`.
    pub fn rotate_half_turn(&self) -> WeightGrid {
        let mut values = self.values.clone();
        values.reverse();
        WeightGrid { bounds: self.bounds, values }
    }

    /// Image of `p` under [`WeightGrid::rotate_half_turn`].
    pub fn rotate_point(&self, p: GridPoint) -> GridPoint {
        let (lo, hi) = (self.bounds.lo, self.bounds.hi);
        GridPoint::new(lo.col + hi.col - p.col, lo.row + hi.row - p.row)
    }

    /// Sub-grid on `sub`, which must lie inside the box.
    pub fn restrict(&self, sub: GridBox) -> Result<WeightGrid> {
        self.bounds.check(sub.lo)?;
        self.bounds.check(sub.hi)?;
        Ok(WeightGrid::from_fn_unchecked(sub, |p| self.at(p)))
    }
}
