use serde::{Deserialize, Serialize};

use super::{GridBox, GridPoint, WeightGrid, NEG_INF, POS_INF};
use crate::error::{LppError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PassageMode {
    /// `L_{x, anchor}` as `x` varies.
    ToTerminal,
    /// `L_{anchor, y}` as `y` varies.
    FromInitial,
}

/// Which endpoint the increments move.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Orientation {
    /// Underlined increments: the initial point steps right/up, the terminal is the anchor.
    InitialPoint,
    /// Overlined increments: the terminal point steps left/down, the initial point is the anchor.
    TerminalPoint,
}

/// Passage times from every point to a fixed terminal, or from a fixed initial point to every
/// point. Incomparable points hold [`NEG_INF`].
#[derive(Debug, Clone)]
pub struct PassageField {
    anchor: GridPoint,
    mode: PassageMode,
    bounds: GridBox,
    values: Vec<f64>,
}

impl PassageField {
    pub fn anchor(&self) -> GridPoint {
        self.anchor
    }

    pub fn mode(&self) -> PassageMode {
        self.mode
    }

    pub fn bounds(&self) -> GridBox {
        self.bounds
    }

    pub fn value(&self, p: GridPoint) -> Option<f64> {
        self.bounds.contains(p).then(|| self.values[self.bounds.index(p)])
    }

    #[inline]
    fn at(&self, p: GridPoint) -> f64 {
        self.values[self.bounds.index(p)]
    }
}

/// Horizontal (`I`) and vertical (`J`) increments of a [`PassageField`].
///
/// Entries at points incomparable with the anchor are undefined and read back as `None`.
/// Increments that would need a passage time to a point outside the anchor's quadrant are
/// [`POS_INF`].
#[derive(Debug, Clone)]
pub struct IncrementField {
    anchor: GridPoint,
    orientation: Orientation,
    bounds: GridBox,
    i: Vec<f64>,
    j: Vec<f64>,
}

impl IncrementField {
    pub fn anchor(&self) -> GridPoint {
        self.anchor
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn bounds(&self) -> GridBox {
        self.bounds
    }

    pub fn horizontal(&self, p: GridPoint) -> Option<f64> {
        self.lookup(&self.i, p)
    }

    pub fn vertical(&self, p: GridPoint) -> Option<f64> {
        self.lookup(&self.j, p)
    }

    fn lookup(&self, table: &[f64], p: GridPoint) -> Option<f64> {
        if !self.bounds.contains(p) {
            return None;
        }
        let v = table[self.bounds.index(p)];
        (!v.is_nan()).then_some(v)
    }
}

/// Backward dynamic programme over the rectangle `[from, z]`.
///
/// `visit(row, values)` is called for rows `z.row` down to `from.row`; `values[c]` is
/// `L_{(from.col + c, row), z}`. Only two rows are kept alive.
pub(crate) fn sweep_backward(
    w: &WeightGrid,
    from: GridPoint,
    z: GridPoint,
    mut visit: impl FnMut(usize, &[f64]),
) {
    debug_assert!(from <= z && w.bounds().contains(from) && w.bounds().contains(z));
    let width = z.col - from.col + 1;
    let offset = from.col - w.bounds().lo().col;
    let mut above: Vec<f64> = Vec::with_capacity(width);
    let mut cur = vec![0.0f64; width];
    for row in (from.row..=z.row).rev() {
        let weights = &w.row(row)[offset..offset + width];
        let top = row == z.row;
        for c in (0..width).rev() {
            let tail = match (c + 1 < width, top) {
                (true, false) => cur[c + 1].max(above[c]),
                (true, true) => cur[c + 1],
                (false, false) => above[c],
                (false, true) => 0.0,
            };
            cur[c] = weights[c] + tail;
        }
        visit(row, &cur);
        std::mem::swap(&mut above, &mut cur);
        cur.resize(width, 0.0);
    }
}

/// Forward dynamic programme over `[u, to]`; `values[c]` is `L_{u, (u.col + c, row)}` and rows
/// are visited bottom to top.
pub(crate) fn sweep_forward(
    w: &WeightGrid,
    u: GridPoint,
    to: GridPoint,
    mut visit: impl FnMut(usize, &[f64]),
) {
    debug_assert!(u <= to && w.bounds().contains(u) && w.bounds().contains(to));
    let width = to.col - u.col + 1;
    let offset = u.col - w.bounds().lo().col;
    let mut below: Vec<f64> = Vec::with_capacity(width);
    let mut cur = vec![0.0f64; width];
    for row in u.row..=to.row {
        let weights = &w.row(row)[offset..offset + width];
        let bottom = row == u.row;
        for c in 0..width {
            let head = match (c > 0, bottom) {
                (true, false) => cur[c - 1].max(below[c]),
                (true, true) => cur[c - 1],
                (false, false) => below[c],
                (false, true) => 0.0,
            };
            cur[c] = weights[c] + head;
        }
        visit(row, &cur);
        std::mem::swap(&mut below, &mut cur);
        cur.resize(width, 0.0);
    }
}

fn check_in(w: &WeightGrid, p: GridPoint) -> Result<()> {
    w.bounds().check(p)
}

/// Maximal weight of an up-right path from `u` to `v`, or [`NEG_INF`] when `u <= v` fails.
pub fn last_passage(w: &WeightGrid, u: GridPoint, v: GridPoint) -> Result<f64> {
    check_in(w, u)?;
    check_in(w, v)?;
    if !(u <= v) {
        return Ok(NEG_INF);
    }
    let mut out = NEG_INF;
    sweep_backward(w, u, v, |row, vals| {
        if row == u.row {
            out = vals[0];
        }
    });
    Ok(out)
}

/// `L_{x, z}` for every `x` in the grid.
pub fn passage_to_terminal(w: &WeightGrid, z: GridPoint) -> Result<PassageField> {
    check_in(w, z)?;
    let bounds = w.bounds();
    let mut values = vec![NEG_INF; bounds.area()];
    let lo = bounds.lo();
    sweep_backward(w, lo, z, |row, vals| {
        let start = bounds.index(GridPoint::new(lo.col, row));
        values[start..start + vals.len()].copy_from_slice(vals);
    });
    Ok(PassageField { anchor: z, mode: PassageMode::ToTerminal, bounds, values })
}

/// `L_{u, y}` for every `y` in the grid.
pub fn passage_from_initial(w: &WeightGrid, u: GridPoint) -> Result<PassageField> {
    check_in(w, u)?;
    let bounds = w.bounds();
    let mut values = vec![NEG_INF; bounds.area()];
    sweep_forward(w, u, bounds.hi(), |row, vals| {
        let start = bounds.index(GridPoint::new(u.col, row));
        values[start..start + vals.len()].copy_from_slice(vals);
    });
    Ok(PassageField { anchor: u, mode: PassageMode::FromInitial, bounds, values })
}

/// Underlined increments `I_x = L_{x,z} - L_{x+(1,0),z}`, `J_x = L_{x,z} - L_{x+(0,1),z}`.
pub fn increments_to_terminal(w: &WeightGrid, z: GridPoint) -> Result<IncrementField> {
    let field = passage_to_terminal(w, z)?;
    let bounds = field.bounds;
    let mut i = vec![f64::NAN; bounds.area()];
    let mut j = vec![f64::NAN; bounds.area()];
    for x in bounds.points() {
        if !(x <= z) {
            continue;
        }
        let k = bounds.index(x);
        let l = field.at(x);
        i[k] = if x.col == z.col { POS_INF } else { l - field.at(x.right()) };
        j[k] = if x.row == z.row { POS_INF } else { l - field.at(x.up()) };
    }
    Ok(IncrementField { anchor: z, orientation: Orientation::InitialPoint, bounds, i, j })
}

/// Overlined increments `I_y = L_{u,y} - L_{u,y-(1,0)}`, `J_y = L_{u,y} - L_{u,y-(0,1)}`.
pub fn increments_from_initial(w: &WeightGrid, u: GridPoint) -> Result<IncrementField> {
    let field = passage_from_initial(w, u)?;
    let bounds = field.bounds;
    let mut i = vec![f64::NAN; bounds.area()];
    let mut j = vec![f64::NAN; bounds.area()];
    for y in bounds.points() {
        if !(u <= y) {
            continue;
        }
        let k = bounds.index(y);
        let l = field.at(y);
        i[k] = match y.left() {
            Some(p) if p.col >= u.col => l - field.at(p),
            _ => POS_INF,
        };
        j[k] = match y.down() {
            Some(p) if p.row >= u.row => l - field.at(p),
            _ => POS_INF,
        };
    }
    Ok(IncrementField { anchor: u, orientation: Orientation::TerminalPoint, bounds, i, j })
}

/// Weights on `[lo, y]` whose passage times to `y` reproduce the increments `L_{x,z} - L_{y,z}`.
///
/// Strictly south-west of `y` the weights are untouched; the row of `y` carries the horizontal
/// increments to `z`, the column of `y` the vertical ones, and `y` itself gets 0.
pub fn induced_weights(w: &WeightGrid, y: GridPoint, z: GridPoint) -> Result<WeightGrid> {
    check_in(w, y)?;
    check_in(w, z)?;
    if !(y <= z) {
        return Err(LppError::NotOrdered { lower: y, upper: z });
    }
    let inc = increments_to_terminal(w, z)?;
    let out = GridBox::new(w.bounds().lo(), y)?;
    Ok(WeightGrid::from_fn_unchecked(out, |x| {
        if x == y {
            0.0
        } else if x.row == y.row {
            inc.horizontal(x).expect("x <= z")
        } else if x.col == y.col {
            inc.vertical(x).expect("x <= z")
        } else {
            w.at(x)
        }
    }))
}

/// A maximising up-right path from `u` to `v`. Ties are resolved by stepping up.
pub fn geodesic(w: &WeightGrid, u: GridPoint, v: GridPoint) -> Result<Vec<GridPoint>> {
    check_in(w, u)?;
    check_in(w, v)?;
    if !(u <= v) {
        return Err(LppError::NotOrdered { lower: u, upper: v });
    }
    let width = v.col - u.col + 1;
    let height = v.row - u.row + 1;
    let mut table = vec![0.0; width * height];
    sweep_backward(w, u, v, |row, vals| {
        let start = (row - u.row) * width;
        table[start..start + width].copy_from_slice(vals);
    });
    let at = |p: GridPoint| table[(p.row - u.row) * width + (p.col - u.col)];
    let mut path = Vec::with_capacity(width + height - 1);
    let mut x = u;
    path.push(x);
    while x != v {
        x = if x.row == v.row {
            x.right()
        } else if x.col == v.col || at(x.up()) >= at(x.right()) {
            x.up()
        } else {
            x.right()
        };
        path.push(x);
    }
    Ok(path)
}
