use lpplab::coupling::*;
use lpplab::environments::{sample_inhomogeneous, RateProfile};
use lpplab::lattice::{last_passage, GridBox, GridPoint, WeightGrid};
use lpplab::rng::RngStream;
use proptest::prelude::*;

fn p(col: usize, row: usize) -> GridPoint {
    GridPoint::new(col, row)
}

fn example() -> TwoRowStrip {
    TwoRowStrip::new(1, vec![5.0, 1.0, 5.0], vec![1.0, 1.0, 1.0]).unwrap()
}

fn strip_strategy() -> impl Strategy<Value = TwoRowStrip> {
    (2usize..24).prop_flat_map(|n| {
        (prop::collection::vec(0.0f64..4.0, n), prop::collection::vec(0.0f64..4.0, n))
            .prop_map(|(a, b)| TwoRowStrip::new(1, a, b).unwrap())
    })
}

/// Brute force over all strip paths: climb from row 1 to row 2 at column m.
fn strip_passage(strip: &TwoRowStrip, i: usize, j: usize) -> f64 {
    (i..=j)
        .map(|m| strip.row1()[i - 1..m].iter().sum::<f64>() + strip.row2()[m - 1..j].iter().sum::<f64>())
        .fold(f64::NEG_INFINITY, f64::max)
}

#[test]
fn diag_diffs_example() {
    assert_eq!(diag_diffs(&example()).unwrap(), vec![0.0, 4.0]);
    let s = TwoRowStrip::new(1, vec![9.0, 2.0, 3.0], vec![2.0, 3.0, 7.0]).unwrap();
    assert_eq!(diag_diffs(&s).unwrap(), vec![0.0, 0.0]);
}

#[test]
fn unused_service_examples() {
    assert_eq!(unused_service(&example()).values, vec![0.0, 0.0, 4.0]);
    let s = TwoRowStrip::new(1, vec![1.0, 2.0, 3.0], vec![1.0, 1.0, 1.0]).unwrap();
    let u = unused_service(&s).values;
    assert_eq!(u[0], 0.0);
    assert_eq!(u[2], 2.0);
}

#[test]
fn swap_example() {
    let swapped = two_row_swap(&example());
    assert_eq!(swapped.row1(), &[5.0, 1.0, 1.0]);
    assert_eq!(swapped.row2(), &[1.0, 1.0, 5.0]);
    let (before, after) = (example().to_grid(), swapped.to_grid());
    assert_eq!(last_passage(&before, p(1, 1), p(3, 2)).unwrap(), 12.0);
    assert_eq!(last_passage(&after, p(1, 1), p(3, 2)).unwrap(), 12.0);
    assert_eq!(last_passage(&before, p(2, 1), p(3, 2)).unwrap(), 7.0);
    assert_eq!(last_passage(&after, p(2, 1), p(3, 2)).unwrap(), 7.0);
    let sums: Vec<f64> = (0..3).map(|t| swapped.row1()[t] + swapped.row2()[t]).collect();
    assert_eq!(sums, vec![6.0, 2.0, 6.0]);
}

#[test]
fn dominating_first_row_is_left_alone() {
    let s = TwoRowStrip::new(1, vec![1.0, 0.5, 0.2], vec![3.0, 3.0, 3.0]).unwrap();
    assert_eq!(two_row_swap(&s), s);
}

#[test]
fn rates_must_increase() {
    assert!(two_row_swap_rates(&example(), 1.5, 1.0).is_err());
    assert!(two_row_swap_rates(&example(), 1.0, 1.0).is_err());
    assert!(two_row_swap_rates(&example(), 1.0, 1.5).is_ok());
}

#[test]
fn queue_examples() {
    let one = TwoRowStrip::new(1, vec![2.0, 1.0], vec![1.0, 1.0]).unwrap();
    let t = queue_trace(&one, 0.0).unwrap();
    assert_eq!((t.departures[0], t.unused[0], t.q[1]), (0.0, 2.0, 1.0));
    let flat = TwoRowStrip::new(1, vec![1.0; 10], vec![1.0; 10]).unwrap();
    let t = queue_trace(&flat, 50.0).unwrap();
    assert!(t.q.iter().all(|&q| q == 50.0));
    assert!(t.departures.iter().all(|&d| d == 1.0));
    assert!(t.unused.iter().all(|&u| u == 0.0));
    assert!(queue_trace(&flat, -1.0).is_err());
}

#[test]
fn csv_exports() {
    let s = example();
    assert!(s.to_csv().starts_with("t,row1,row2\n"));
    let t = queue_trace(&s, 0.0).unwrap();
    assert_eq!(t.to_csv().lines().count(), 4);
}

#[test]
fn permutations() {
    let id = FinitePermutation::identity();
    assert!(id.is_identity());
    let t = FinitePermutation::transposition(2, 5);
    assert_eq!((t.apply(2), t.apply(5), t.apply(3), t.apply(9)), (5, 2, 3, 9));
    assert!(FinitePermutation::from_images(1, vec![1, 1, 2]).is_err());
    let sigma = FinitePermutation::from_images(3, vec![5, 3, 4]).unwrap();
    let mut cur: Vec<i64> = (3..=5).collect();
    for &s in sigma.adjacent_transpositions() {
        cur.swap((s - 3) as usize, (s - 2) as usize);
    }
    assert_eq!(cur, vec![5, 3, 4]);
}

#[test]
fn admissibility_examples() {
    let id = FinitePermutation::identity();
    let pair = |a, b, c, d| EndpointPair::new(p(a, b), p(c, d)).unwrap();
    assert!(is_admissible(&id, &id, &pair(3, 3, 4, 4)));
    let sigma = FinitePermutation::transposition(2, 5);
    assert!(is_admissible(&sigma, &id, &pair(1, 1, 6, 3)));
    assert!(is_admissible(&sigma, &id, &pair(2, 1, 5, 3)));
    assert!(!is_admissible(&sigma, &id, &pair(3, 1, 4, 3)));
    assert!(!is_admissible(&sigma, &id, &pair(1, 1, 3, 3)));
    assert!(EndpointPair::new(p(2, 1), p(1, 2)).is_err());
}

#[test]
fn identity_permutation_keeps_grid() {
    let w = WeightGrid::from_fn(GridBox::with_size(4, 4).unwrap(), |q| (q.col + 2 * q.row) as f64).unwrap();
    let id = FinitePermutation::identity();
    let (w2, b2) = permute_row_rates(&w, &[1.0; 4], &id, &[]).unwrap();
    assert_eq!((w2, b2), (w.clone(), vec![1.0; 4]));
    let (w3, _) = permute_column_rates(&w, &[0.0; 4], &id, &[]).unwrap();
    assert_eq!(w3, w);
}

#[test]
fn adjacent_row_swap_is_the_strip_transform() {
    let b = [1.0, 0.8, 1.3, 1.1];
    let w = sample_inhomogeneous(&RateProfile::new(vec![0.0], b.to_vec()).unwrap(), GridBox::with_size(12, 4).unwrap(), &RngStream::new(3)).unwrap();
    let tau = FinitePermutation::transposition(2, 3);
    let (w2, rates) = permute_row_rates(&w, &b, &tau, &[]).unwrap();
    let direct = two_row_swap(&TwoRowStrip::from_grid(&w, 2).unwrap());
    assert_eq!(w2.row(2), direct.row1());
    assert_eq!(w2.row(3), direct.row2());
    assert_eq!(w2.row(1), w.row(1));
    assert_eq!(rates, vec![1.0, 1.3, 0.8, 1.1]);
}

#[test]
fn protected_pairs_across_a_row_transposition() {
    let b: Vec<f64> = (1..=8).map(|j| 0.6 + 0.1 * j as f64).collect();
    let profile = RateProfile::new(vec![0.0], b.clone()).unwrap();
    let bounds = GridBox::with_size(8, 8).unwrap();
    let tau = FinitePermutation::transposition(3, 5);
    for rep in 0..20 {
        let w = sample_inhomogeneous(&profile, bounds, &RngStream::new(rep)).unwrap();
        let mut protected = Vec::new();
        for x in bounds.points().filter(|x| x.row <= 3) {
            for y in bounds.points().filter(|y| y.row >= 5 && x <= *y) {
                protected.push(EndpointPair::new(x, y).unwrap());
            }
        }
        let (w2, _) = permute_row_rates(&w, &b, &tau, &protected).unwrap();
        for pair in &protected {
            let before = last_passage(&w, pair.x(), pair.y()).unwrap();
            let after = last_passage(&w2, pair.x(), pair.y()).unwrap();
            assert!((before - after).abs() <= 1e-9 * before.max(1.0));
        }
    }
}

#[test]
fn conflicting_protection_is_an_error() {
    let w = WeightGrid::from_fn(GridBox::with_size(4, 4).unwrap(), |_| 1.0).unwrap();
    let tau = FinitePermutation::transposition(2, 3);
    let bad = [EndpointPair::new(p(1, 3), p(4, 4)).unwrap()];
    assert!(permute_row_rates(&w, &[1.0, 1.2, 1.4, 1.6], &tau, &bad).is_err());
}

#[test]
fn column_version_is_transposed_row_version() {
    let a = [0.1, -0.2, 0.3, 0.0, 0.2];
    let profile = RateProfile::new(a.to_vec(), vec![1.0]).unwrap();
    let w = sample_inhomogeneous(&profile, GridBox::with_size(5, 6).unwrap(), &RngStream::new(17)).unwrap();
    let sigma = FinitePermutation::from_images(2, vec![4, 2, 3]).unwrap();
    let (cols, a2) = permute_column_rates(&w, &a, &sigma, &[]).unwrap();
    let (rows, b2) = permute_row_rates(&w.transpose(), &a, &sigma, &[]).unwrap();
    assert_eq!(cols, rows.transpose());
    assert_eq!(a2, b2);
}

proptest! {
    #[test]
    fn swap_preserves_strip_passage(strip in strip_strategy()) {
        let swapped = two_row_swap(&strip);
        let n = strip.len();
        for i in 1..=n {
            for j in i..=n {
                let before = strip_passage(&strip, i, j);
                let after = strip_passage(&swapped, i, j);
                prop_assert!((before - after).abs() <= 1e-9 * before.abs().max(1.0));
            }
        }
        for t in 0..n {
            let a = strip.row1()[t] + strip.row2()[t];
            let b = swapped.row1()[t] + swapped.row2()[t];
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }
    }

    #[test]
    fn diag_diffs_antisymmetry(strip in strip_strategy()) {
        let c = diag_diffs(&strip).unwrap();
        let mut flipped = diag_diffs(&strip.reflect()).unwrap();
        flipped.reverse();
        for (x, y) in c.iter().zip(&flipped) {
            prop_assert!((x + y).abs() <= 1e-12);
        }
    }

    #[test]
    fn queue_unused_is_positive_part(strip in strip_strategy(), q0 in 0.0f64..3.0) {
        let t = queue_trace(&strip, q0).unwrap();
        for n in 0..strip.len() {
            prop_assert!((t.unused[n] - (t.service[n] - t.q[n]).max(0.0)).abs() <= 1e-12);
        }
    }

    #[test]
    fn infimum_attained_after_first_positive(strip in strip_strategy()) {
        let us = unused_service(&strip);
        if let Some(x0) = us.values.iter().position(|&u| u > 0.0) {
            for t in x0 + 1..strip.len() {
                prop_assert!(us.minimizer[t].map_or(false, |m| m >= strip.s_min() + x0));
            }
        }
    }
}
