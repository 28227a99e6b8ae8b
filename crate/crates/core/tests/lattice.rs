use lpplab::harness::oracle::{all_paths, brute_force_passage, path_weight};
use lpplab::lattice::*;
use proptest::prelude::*;

fn two_by_two() -> WeightGrid {
    WeightGrid::from_rows(GridBox::with_size(2, 2).unwrap(), &[vec![1.0, 3.0], vec![2.0, 4.0]]).unwrap()
}

fn p(col: usize, row: usize) -> GridPoint {
    GridPoint::new(col, row)
}

/// Independent recursive maximum over up-right paths.
fn recursive_lpp(w: &WeightGrid, u: GridPoint, v: GridPoint) -> Option<f64> {
    if !(u <= v) {
        return None;
    }
    if u == v {
        return Some(w.at(u));
    }
    let right = if u.col < v.col { recursive_lpp(w, u.right(), v) } else { None };
    let up = if u.row < v.row { recursive_lpp(w, u.up(), v) } else { None };
    let best = match (right, up) {
        (Some(a), Some(b)) => a.max(b),
        (Some(a), None) | (None, Some(a)) => a,
        (None, None) => unreachable!(),
    };
    Some(w.at(u) + best)
}

fn grid_strategy(max: usize) -> impl Strategy<Value = WeightGrid> {
    (1..=max, 1..=max).prop_flat_map(|(c, r)| {
        prop::collection::vec(-2.0f64..5.0, c * r)
            .prop_map(move |v| WeightGrid::from_row_major(GridBox::with_size(c, r).unwrap(), v).unwrap())
    })
}

#[test]
fn single_point_passage_is_the_weight() {
    let w = two_by_two();
    for x in w.bounds().points() {
        assert_eq!(last_passage(&w, x, x).unwrap(), w.at(x));
    }
}

#[test]
fn two_by_two_passage_and_paths() {
    let w = two_by_two();
    assert_eq!(last_passage(&w, p(1, 1), p(2, 2)).unwrap(), 8.0);
    assert_eq!(last_passage(&w, p(2, 1), p(1, 2)).unwrap(), NEG_INF);
    let paths = all_paths(p(1, 1), p(2, 2));
    let mut weights: Vec<f64> = paths.iter().map(|q| path_weight(&w, q)).collect();
    weights.sort_by(f64::total_cmp);
    assert_eq!(weights, vec![7.0, 8.0]);
    assert_eq!(geodesic(&w, p(1, 1), p(2, 2)).unwrap(), vec![p(1, 1), p(2, 1), p(2, 2)]);
}

#[test]
fn two_by_two_increments() {
    let w = two_by_two();
    let f = increments_to_terminal(&w, p(2, 2)).unwrap();
    assert_eq!(f.horizontal(p(1, 1)), Some(1.0));
    assert_eq!(f.vertical(p(1, 1)), Some(2.0));
    // terminal column and row carry the POS_INF convention
    assert_eq!(f.horizontal(p(2, 1)), Some(POS_INF));
    assert_eq!(f.vertical(p(1, 2)), Some(POS_INF));

    let g = increments_from_initial(&w, p(1, 1)).unwrap();
    assert_eq!(g.horizontal(p(2, 2)), Some(5.0));
    assert_eq!(g.vertical(p(2, 2)), Some(4.0));
    assert_eq!(g.horizontal(p(1, 1)), Some(POS_INF));
    assert_eq!(g.vertical(p(1, 1)), Some(POS_INF));
}

#[test]
fn increments_outside_the_comparable_region_are_undefined() {
    let w = WeightGrid::from_fn(GridBox::with_size(3, 3).unwrap(), |q| (q.col * 3 + q.row) as f64).unwrap();
    let f = increments_to_terminal(&w, p(2, 2)).unwrap();
    assert_eq!(f.horizontal(p(3, 1)), None);
    assert_eq!(f.vertical(p(1, 3)), None);
    let g = increments_from_initial(&w, p(2, 2)).unwrap();
    assert_eq!(g.horizontal(p(1, 3)), None);
}

#[test]
fn single_row_increments_are_the_weights() {
    let w = WeightGrid::from_rows(GridBox::with_size(5, 1).unwrap(), &[vec![0.3, 1.7, 2.2, 0.1, 4.0]]).unwrap();
    let f = increments_to_terminal(&w, p(5, 1)).unwrap();
    for col in 1..5 {
        assert!((f.horizontal(p(col, 1)).unwrap() - w.at(p(col, 1))).abs() < 1e-12);
    }
}

#[test]
fn passage_fields_hold_anchor_weight() {
    let w = two_by_two();
    let f = passage_to_terminal(&w, p(2, 2)).unwrap();
    assert_eq!(f.value(p(2, 2)), Some(4.0));
    assert_eq!(f.value(p(1, 1)), Some(8.0));
    let g = passage_from_initial(&w, p(2, 1)).unwrap();
    assert_eq!(g.value(p(2, 1)), Some(3.0));
    assert_eq!(g.value(p(1, 2)), Some(NEG_INF));
}

#[test]
fn induced_weights_cases() {
    let w = WeightGrid::from_fn(GridBox::with_size(4, 4).unwrap(), |q| ((q.col * 7 + q.row * 3) % 5) as f64 + 0.5).unwrap();
    let (y, z) = (p(3, 3), p(4, 4));
    let induced = induced_weights(&w, y, z).unwrap();
    assert_eq!(induced.at(y), 0.0);
    for x in induced.bounds().points().filter(|x| x.col < y.col && x.row < y.row) {
        assert_eq!(induced.at(x), w.at(x));
    }
}

#[test]
fn out_of_box_points_are_errors() {
    let w = two_by_two();
    assert!(last_passage(&w, p(1, 1), p(3, 2)).is_err());
    assert!(increments_to_terminal(&w, p(0, 1)).is_err());
    assert!(GridBox::new(p(2, 2), p(1, 1)).is_err());
}

#[test]
fn csv_round_trip() {
    let w = WeightGrid::from_fn(GridBox::new(p(2, 3), p(4, 5)).unwrap(), |q| q.col as f64 / q.row as f64).unwrap();
    let back = WeightGrid::from_csv(&w.to_csv()).unwrap();
    assert_eq!(back, w);
}

proptest! {
    #[test]
    fn passage_matches_recursive_enumeration(w in grid_strategy(4)) {
        for u in w.bounds().points() {
            for v in w.bounds().points() {
                let fast = last_passage(&w, u, v).unwrap();
                match recursive_lpp(&w, u, v) {
                    Some(slow) => prop_assert!((fast - slow).abs() <= 1e-9),
                    None => prop_assert_eq!(fast, NEG_INF),
                }
                prop_assert_eq!(brute_force_passage(&w, u, v).is_some(), fast != NEG_INF);
            }
        }
    }

    #[test]
    fn geodesic_weight_is_passage_time(w in grid_strategy(5)) {
        let (u, v) = (w.bounds().lo(), w.bounds().hi());
        let path = geodesic(&w, u, v).unwrap();
        prop_assert_eq!(path[0], u);
        prop_assert_eq!(*path.last().unwrap(), v);
        for step in path.windows(2) {
            prop_assert!(step[1] == step[0].right() || step[1] == step[0].up());
        }
        prop_assert!((path_weight(&w, &path) - last_passage(&w, u, v).unwrap()).abs() <= 1e-9);
    }

    #[test]
    fn recursion_recovery_and_monotonicity(w in grid_strategy(6), zc in 1usize..6, zr in 1usize..6) {
        let b = w.bounds();
        let z = p(zc.min(b.width()), zr.min(b.height()));
        let f = increments_to_terminal(&w, z).unwrap();
        for x in b.points().filter(|x| *x <= z && *x != z) {
            let (i, j) = (f.horizontal(x).unwrap(), f.vertical(x).unwrap());
            prop_assert!((i.min(j) - w.at(x)).abs() <= 1e-9);
            if x.col < z.col && x.row < z.row {
                let iu = f.horizontal(x.up()).unwrap();
                let jr = f.vertical(x.right()).unwrap();
                prop_assert!((i - (w.at(x) + (iu - jr).max(0.0))).abs() <= 1e-9);
                prop_assert!((j - (w.at(x) + (jr - iu).max(0.0))).abs() <= 1e-9);
            }
        }
        if z.col < b.width() {
            let g = increments_to_terminal(&w, z.right()).unwrap();
            for x in b.points().filter(|x| *x <= z) {
                prop_assert!(f.horizontal(x).unwrap() >= g.horizontal(x).unwrap() - 1e-9);
                prop_assert!(f.vertical(x).unwrap() <= g.vertical(x).unwrap() + 1e-9);
            }
        }
        if z.row < b.height() {
            let g = increments_to_terminal(&w, z.up()).unwrap();
            for x in b.points().filter(|x| *x <= z) {
                prop_assert!(f.horizontal(x).unwrap() <= g.horizontal(x).unwrap() + 1e-9);
                prop_assert!(f.vertical(x).unwrap() >= g.vertical(x).unwrap() - 1e-9);
            }
        }
    }

    #[test]
    fn overline_equals_rotated_underline(w in grid_strategy(3)) {
        let u = w.bounds().lo();
        let rotated = w.rotate_half_turn();
        let over = increments_from_initial(&w, u).unwrap();
        let under = increments_to_terminal(&rotated, rotated.rotate_point(u)).unwrap();
        for y in w.bounds().points() {
            let q = rotated.rotate_point(y);
            prop_assert_eq!(over.horizontal(y).map(|v| (v * 1e9).round()), under.horizontal(q).map(|v| (v * 1e9).round()));
            prop_assert_eq!(over.vertical(y).map(|v| (v * 1e9).round()), under.vertical(q).map(|v| (v * 1e9).round()));
        }
    }

    #[test]
    fn induced_identity(w in grid_strategy(4), a in 0usize..16, b in 0usize..16) {
        let bx = w.bounds();
        let z = p(1 + b % bx.width(), 1 + (b / 4) % bx.height());
        let y = p(1 + a % z.col, 1 + (a / 4) % z.row);
        let induced = induced_weights(&w, y, z).unwrap();
        let lyz = last_passage(&w, y, z).unwrap();
        for x in bx.points().filter(|x| *x <= y) {
            let lhs = last_passage(&induced, x, y).unwrap();
            let rhs = last_passage(&w, x, z).unwrap() - lyz;
            prop_assert!((lhs - rhs).abs() <= 1e-9);
        }
    }
}
