//! Exhaustive path enumeration, used as an independent check on the dynamic programme.

use crate::lattice::{GridPoint, WeightGrid};

/// Every up-right path from `u` to `v` (empty when `u <= v` fails).
pub fn all_paths(u: GridPoint, v: GridPoint) -> Vec<Vec<GridPoint>> {
    if !(u <= v) {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut path = vec![u];
    extend(&mut path, v, &mut out);
    out
}

fn extend(path: &mut Vec<GridPoint>, v: GridPoint, out: &mut Vec<Vec<GridPoint>>) {
    let x = *path.last().unwrap();
    if x == v {
        out.push(path.clone());
        return;
    }
    if x.col < v.col {
        path.push(x.right());
        extend(path, v, out);
        path.pop();
    }
    if x.row < v.row {
        path.push(x.up());
        extend(path, v, out);
        path.pop();
    }
}

pub fn path_weight(w: &WeightGrid, path: &[GridPoint]) -> f64 {
    path.iter().map(|&p| w.at(p)).sum()
}

/// Maximum path weight by enumeration, `None` when no path exists.
pub fn brute_force_passage(w: &WeightGrid, u: GridPoint, v: GridPoint) -> Option<f64> {
    all_paths(u, v).iter().map(|p| path_weight(w, p)).reduce(f64::max)
}
