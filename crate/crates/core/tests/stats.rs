use lpplab::rng::RngStream;
use lpplab::stats::*;
use proptest::prelude::*;

fn exp_sample(n: usize, rate: f64, seed: u64) -> Sample {
    let rng = RngStream::new(seed);
    Sample::new((0..n as u64).map(|i| rng.exponential(i, rate)).collect()).unwrap()
}

fn normal_pair(rng: &RngStream, i: u64) -> (f64, f64) {
    let (u1, u2) = (rng.uniform(2 * i), rng.uniform(2 * i + 1));
    let r = (-2.0 * u1.ln()).sqrt();
    let t = std::f64::consts::TAU * u2;
    (r * t.cos(), r * t.sin())
}

#[test]
fn ks_one_sample_calibration_and_power() {
    let good = ks_one_sample_exp(&exp_sample(200_000, 1.0, 1), 1.0).unwrap();
    assert!(good.statistic < 0.006 && good.pass);
    let bad = ks_one_sample_exp(&exp_sample(10_000, 2.0, 2), 1.0).unwrap();
    assert!(!bad.pass);
    assert!((bad.statistic - 0.25).abs() < 0.02, "{}", bad.statistic);
    let flat = ks_one_sample_exp(&Sample::new(vec![1.0; 200]).unwrap(), 1.0).unwrap();
    let f = 1.0 - (-1.0f64).exp();
    assert!((flat.statistic - f.max(1.0 - f)).abs() < 1e-12);
}

#[test]
fn ks_two_sample_examples() {
    let a = Sample::new(vec![1.0, 2.0, 3.0]).unwrap();
    let b = Sample::new(vec![1.5, 2.5, 3.5]).unwrap();
    assert!((ks_two_sample(&a, &b).unwrap().statistic - 1.0 / 3.0).abs() < 1e-12);
    assert_eq!(ks_two_sample(&a, &a).unwrap().statistic, 0.0);
    let far = Sample::new(vec![10.0, 11.0]).unwrap();
    assert_eq!(ks_two_sample(&a, &far).unwrap().statistic, 1.0);
}

#[test]
fn atom_tail_examples() {
    let rng = RngStream::new(4);
    let values: Vec<f64> = (0..10_000u64)
        .map(|i| if rng.uniform(2 * i) <= 0.75 { 0.0 } else { rng.exponential(2 * i + 1, 0.5) })
        .collect();
    let rep = atom_tail_test(&Sample::new(values).unwrap(), 0.75, 0.5).unwrap();
    assert!(rep.pass(), "{:?}", rep);
    assert!(rep.atom.statistic < 0.02);
    let pure = atom_tail_test(&Sample::new(vec![0.0; 100]).unwrap(), 1.0, 0.5).unwrap();
    assert!(pure.pass() && pure.tail.is_none());
    assert!(atom_tail_test(&Sample::new(vec![-1.0, 0.0]).unwrap(), 0.5, 1.0).is_err());
}

#[test]
fn energy_distance_cases() {
    let rng = RngStream::new(8);
    let rows: Vec<Vec<f64>> = (0..300u64).map(|i| { let (x, y) = normal_pair(&rng, i); vec![x, y] }).collect();
    let a = JointSample::from_rows(&rows).unwrap();
    assert!(energy_distance(&a, &a).unwrap().abs() < 1e-12);
    let mismatch = JointSample::from_rows(&[vec![1.0]]).unwrap();
    assert!(energy_distance_test(&a, &mismatch, 9, 1).is_err());

    let n = 2000u64;
    let x: Vec<Vec<f64>> = (0..n).map(|i| vec![normal_pair(&rng, i).0]).collect();
    let y: Vec<Vec<f64>> = (n..2 * n).map(|i| vec![normal_pair(&rng, i).0 + 1.0]).collect();
    let z: Vec<Vec<f64>> = (2 * n..3 * n).map(|i| vec![normal_pair(&rng, i).0]).collect();
    let (x, y, z) = (JointSample::from_rows(&x).unwrap(), JointSample::from_rows(&y).unwrap(), JointSample::from_rows(&z).unwrap());
    let shifted = energy_distance_test(&x, &y, 199, 3).unwrap();
    assert!(shifted.p_value.unwrap() < 0.01 && shifted.statistic > 0.0);
    let same = energy_distance_test(&x, &z, 199, 3).unwrap();
    assert!(same.p_value.unwrap() >= 0.001, "{}", same.summary_line());
    assert_eq!(same.p_value, energy_distance_test(&x, &z, 199, 3).unwrap().p_value);
}

#[test]
fn independence_cases() {
    let rng = RngStream::new(12);
    let n = 1000u64;
    let x: Vec<f64> = (0..n).map(|i| rng.uniform(i) - 0.5).collect();
    let y: Vec<f64> = (n..2 * n).map(|i| rng.uniform(i)).collect();
    let xs = Sample::new(x.clone()).unwrap();
    let same = independence_test(&xs, &xs, 199, 1).unwrap();
    assert!(same.p_value.unwrap() < 0.01);
    assert!((distance_correlation(&xs, &xs).unwrap() - 1.0).abs() < 1e-9);
    let indep = independence_test(&xs, &Sample::new(y).unwrap(), 199, 1).unwrap();
    assert!(indep.p_value.unwrap() >= 0.001);
    let square = Sample::new(x.iter().map(|v| v * v).collect()).unwrap();
    assert!(pearson(&x, square.values()).abs() < 0.1);
    assert!(independence_test(&xs, &square, 199, 1).unwrap().p_value.unwrap() < 0.01);
    let constant = Sample::new(vec![2.0; n as usize]).unwrap();
    let c = independence_test(&xs, &constant, 99, 1).unwrap();
    assert!(c.pass && c.statistic == 0.0);
}

#[test]
fn report_serialization() {
    let rep = TestReport::bound("x", 0.1, 0.2, vec![10]).with_seed(5);
    let json = serde_json::to_value(&rep).unwrap();
    for key in ["name", "statistic", "threshold", "p_value", "pass", "n", "seed", "runtime_ms"] {
        assert!(json.get(key).is_some(), "missing {key}");
    }
    assert!(rep.summary_line().starts_with("PASS"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ks_bounds_and_symmetry(a in prop::collection::vec(0.0f64..10.0, 1..60), b in prop::collection::vec(0.0f64..10.0, 1..60)) {
        let (sa, sb) = (Sample::new(a).unwrap(), Sample::new(b).unwrap());
        let ab = ks_two_sample(&sa, &sb).unwrap().statistic;
        let ba = ks_two_sample(&sb, &sa).unwrap().statistic;
        prop_assert!((0.0..=1.0).contains(&ab));
        prop_assert!((ab - ba).abs() < 1e-12);
        let one = ks_one_sample_exp(&sa, 1.0).unwrap().statistic;
        prop_assert!((0.0..=1.0).contains(&one));
    }

    #[test]
    fn energy_is_nonnegative(a in prop::collection::vec(-5.0f64..5.0, 2..30), b in prop::collection::vec(-5.0f64..5.0, 2..30)) {
        let ja = JointSample::new(1, a).unwrap();
        let jb = JointSample::new(1, b).unwrap();
        prop_assert!(energy_distance(&ja, &jb).unwrap() >= -1e-12);
    }
}
