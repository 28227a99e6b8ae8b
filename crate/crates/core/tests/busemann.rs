use lpplab::busemann::*;
use lpplab::environments::{sample_eta, sample_iid_exp1, sample_inhomogeneous, EtaSpec, RateProfile};
use lpplab::lattice::{increments_to_terminal, GridBox, GridPoint};
use lpplab::rng::RngStream;
use lpplab::stats::{ks_one_sample_exp, ks_two_sample, Sample};
use proptest::prelude::*;

fn p(col: usize, row: usize) -> GridPoint {
    GridPoint::new(col, row)
}

#[test]
fn zeta_values() {
    assert_eq!(zeta(0.0).unwrap(), 0.0);
    assert_eq!(zeta(f64::INFINITY).unwrap(), 1.0);
    assert_eq!(zeta(1.0).unwrap(), 0.5);
    assert!((zeta(4.0).unwrap() - 2.0 / 3.0).abs() < 1e-15);
    assert!((zeta(0.25).unwrap() - 1.0 / 3.0).abs() < 1e-15);
    assert!(zeta(-1.0).is_err());
    for i in 1..200 {
        let r = i as f64 * 0.173;
        assert!((zeta(1.0 / r).unwrap() - (1.0 - zeta(r).unwrap())).abs() < 1e-12);
    }
}

#[test]
fn one_direction_boundary_is_the_weights() {
    let spec = EtaSpec::new(4, 3, vec![2.0]).unwrap();
    let rng = RngStream::new(5);
    let s = exact_busemann_sample(&spec, &rng);
    let w = sample_eta(&spec, &rng);
    for col in 1..4 {
        assert!((s.horizontal(p(col, 3), 1).unwrap() - w.at(p(col, 3))).abs() < 1e-12);
    }
    for row in 1..3 {
        assert!((s.vertical(p(4, row), 1).unwrap() - w.at(p(4, row))).abs() < 1e-12);
    }
}

#[test]
fn sample_layout_and_csv() {
    let spec = EtaSpec::new(3, 2, vec![1.0, 4.0]).unwrap();
    let s = exact_busemann_sample(&spec, &RngStream::new(1));
    assert_eq!(s.horizontal_edges().count(), 4);
    assert_eq!(s.vertical_edges().count(), 3);
    let header = s.csv_header();
    assert!(header.starts_with("I_1_1_p1,I_1_1_p2,"));
    assert_eq!(header.split(',').count(), 14);
    assert_eq!(s.csv_row().split(',').count(), 14);
    assert_eq!(s.horizontal(p(3, 1), 1), None);
    assert_eq!(s.vertical(p(1, 2), 1), None);
}

#[test]
fn increment_cdf_values() {
    assert!((increment_cdf_complement(1.0, 4.0, 0.0).unwrap() - 1.0).abs() < 1e-15);
    assert!((increment_cdf_complement(1.0, 4.0, 2.0).unwrap() - 0.25 * (-1.0f64).exp()).abs() < 1e-12);
    let atom = 1.0 - increment_cdf_complement(1.0, 4.0, 1e-12).unwrap();
    assert!((atom - 0.75).abs() < 1e-9);
    assert!(increment_cdf_complement(4.0, 1.0, 1.0).is_err());
}

#[test]
fn recurrence_index_examples() {
    assert_eq!(recurrence_index(&[0.2; 5], 2, 5).unwrap(), 2);
    assert_eq!(recurrence_index(&[0.0, -0.3, -0.3, -0.5], 1, 3).unwrap(), 2);
    assert_eq!(recurrence_index(&[0.0, -0.1, -0.2, -0.3], 1, 4).unwrap(), 4);
    assert!(recurrence_index(&[0.0, 1.0], 2, 1).is_err());
}

#[test]
fn prelimit_terminals_respect_gap() {
    let dirs = DirectionSet::new(vec![1.0, 1.001, 4.0]).unwrap();
    let t = prelimit_terminals(2, 1, &dirs, 100).unwrap();
    assert!(t.windows(2).all(|w| w[1].col >= w[0].col + 2 && w[1].row + 2 <= w[0].row + 2));
    assert!(prelimit_terminals(2, 200, &dirs, 100).is_err());
}

#[test]
fn prelimit_heights_agree_with_direct_computation() {
    let dirs = DirectionSet::new(vec![1.0, 4.0]).unwrap();
    let rng = RngStream::new(13);
    let multi = prelimit_busemann_heights(2, 2, &dirs, &[16, 32], &rng).unwrap();
    let single = prelimit_busemann_sample(2, 2, &dirs, 32, &rng).unwrap();
    assert_eq!(multi[1], single);
    // direct: increments of an iid grid to the prelimit terminals
    let terminals = prelimit_terminals(2, 2, &dirs, 16).unwrap();
    let grid = sample_iid_exp1(GridBox::with_size(terminals[1].col, 16).unwrap(), &rng);
    for (q, z) in terminals.iter().enumerate() {
        let f = increments_to_terminal(&grid, *z).unwrap();
        let got = multi[0].horizontal(p(1, 2), q + 1).unwrap();
        assert!((got - f.horizontal(p(1, 2)).unwrap()).abs() < 1e-9);
    }
}

#[test]
fn prelimit_marginal_close_to_exact() {
    let dirs = DirectionSet::new(vec![1.0]).unwrap();
    let n = 5000;
    let pre_rng = RngStream::new(31).fork("pre");
    let ex_rng = RngStream::new(31).fork("exact");
    let spec = EtaSpec::new(2, 1, vec![1.0]).unwrap();
    let pre: Vec<f64> = (0..n)
        .map(|i| prelimit_busemann_sample(2, 1, &dirs, 256, &pre_rng.replica(i)).unwrap().horizontal(p(1, 1), 1).unwrap())
        .collect();
    let exact: Vec<f64> = (0..n)
        .map(|i| exact_busemann_sample(&spec, &ex_rng.replica(i)).horizontal(p(1, 1), 1).unwrap())
        .collect();
    let rep = ks_two_sample(&Sample::new(pre).unwrap(), &Sample::new(exact).unwrap()).unwrap();
    assert!(rep.statistic <= 0.04, "{}", rep.summary_line());
}

#[test]
fn thin_homogeneous_vertical_is_the_weight() {
    let w = sample_iid_exp1(GridBox::with_size(1, 64).unwrap(), &RngStream::new(2));
    let u = p(1, 3);
    let r = thin_busemann_on_grid(&w, u, ThinLine::Column(1), IncrementKind::J, 64).unwrap();
    assert!(r.converged);
    assert!((r.value - w.at(u)).abs() < 1e-12);
}

#[test]
fn thin_homogeneous_wider_column_approaches_the_weight() {
    // all rates tie, so agreement with the weight only builds up slowly with height
    let rng = RngStream::new(3);
    let hits = |height: usize| {
        (0..400)
            .filter(|&i| {
                let w = sample_iid_exp1(GridBox::with_size(3, height).unwrap(), &rng.replica(i));
                let r = thin_busemann_on_grid(&w, p(1, 1), ThinLine::Column(3), IncrementKind::J, height).unwrap();
                (r.value - w.at(p(1, 1))).abs() < 1e-12
            })
            .count()
    };
    let (low, high) = (hits(16), hits(1024));
    assert!(high > low, "{low} {high}");
    assert!(high >= 300, "{high}");
}

#[test]
fn thin_row_line_uses_transpose() {
    let w = sample_iid_exp1(GridBox::with_size(256, 4).unwrap(), &RngStream::new(6));
    let r = thin_busemann_on_grid(&w, p(2, 1), ThinLine::Row(3), IncrementKind::I, 256).unwrap();
    assert!(r.converged);
    assert!((r.value - w.at(p(2, 1))).abs() < 1e-9);
}

#[test]
fn thin_recurrence_equality() {
    let a = vec![0.0, -0.4, -0.1, -0.6, -0.2];
    let profile = RateProfile::new(a.clone(), vec![1.0]).unwrap();
    let bounds = GridBox::with_size(5, 2048).unwrap();
    for rep in 0..30 {
        let w = sample_inhomogeneous(&profile, bounds, &RngStream::new(rep)).unwrap();
        for k in [3usize, 5] {
            let m = recurrence_index(&a, 1, k).unwrap();
            let lhs = thin_busemann_on_grid(&w, p(1, 1), ThinLine::Column(k), IncrementKind::I, 2048).unwrap();
            let rhs = thin_busemann_on_grid(&w, p(1, 1), ThinLine::Column(m), IncrementKind::I, 2048).unwrap();
            if lhs.converged && rhs.converged {
                assert!((lhs.value - rhs.value).abs() < 1e-9, "rep {rep} k {k}");
            }
        }
    }
}

#[test]
fn thin_marginal() {
    let profile = RateProfile::new(vec![0.0, -0.5], vec![1.0]).unwrap();
    let rng = RngStream::new(44);
    let values: Vec<f64> = (0..3000)
        .map(|i| thin_busemann(&profile, p(1, 1), ThinLine::Column(2), IncrementKind::I, 1024, &rng.replica(i)).unwrap().value)
        .collect();
    let rep = ks_one_sample_exp(&Sample::new(values).unwrap(), 0.5).unwrap();
    assert!(rep.pass, "{}", rep.summary_line());
}

#[test]
fn thin_rejects_bad_input() {
    let w = sample_iid_exp1(GridBox::with_size(3, 64).unwrap(), &RngStream::new(1));
    assert!(thin_busemann_on_grid(&w, p(3, 1), ThinLine::Column(3), IncrementKind::I, 64).is_err());
    assert!(thin_busemann_on_grid(&w, p(1, 1), ThinLine::Column(4), IncrementKind::I, 64).is_err());
    assert!(thin_busemann_on_grid(&w, p(1, 1), ThinLine::Column(2), IncrementKind::I, 128).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exact_samples_are_monotone_and_recover_weights(seed in any::<u64>(), k in 1usize..4, l in 1usize..4) {
        let spec = EtaSpec::new(k, l, vec![0.5, 1.0, 3.0]).unwrap();
        let rng = RngStream::new(seed);
        let s = exact_busemann_sample(&spec, &rng);
        let w = sample_eta(&spec, &rng);
        for u in s.horizontal_edges().collect::<Vec<_>>() {
            for q in 1..3 {
                prop_assert!(s.horizontal(u, q).unwrap() >= s.horizontal(u, q + 1).unwrap() - 1e-12);
            }
        }
        for v in s.vertical_edges().collect::<Vec<_>>() {
            for q in 1..3 {
                prop_assert!(s.vertical(v, q).unwrap() <= s.vertical(v, q + 1).unwrap() + 1e-12);
            }
        }
        // inner cells have both increments; their minimum is the weight for every direction
        for x in GridBox::with_size(k, l).unwrap().points().filter(|x| x.col < k && x.row < l) {
            for q in 1..=3 {
                let m = s.horizontal(x, q).unwrap().min(s.vertical(x, q).unwrap());
                prop_assert!((m - w.at(x)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn thin_prelimits_are_monotone(seed in any::<u64>()) {
        let profile = RateProfile::new(vec![0.0, -0.3, -0.5], vec![1.0]).unwrap();
        let w = sample_inhomogeneous(&profile, GridBox::with_size(3, 64).unwrap(), &RngStream::new(seed)).unwrap();
        let mut last_i = f64::NEG_INFINITY;
        let mut last_j = f64::INFINITY;
        for n in 2..=64 {
            let f = increments_to_terminal(&w, p(3, n)).unwrap();
            let (i, j) = (f.horizontal(p(1, 1)).unwrap(), f.vertical(p(1, 1)).unwrap());
            prop_assert!(i >= last_i - 1e-9 && j <= last_j + 1e-9);
            last_i = i;
            last_j = j;
        }
    }
}
