use lpplab_demo::{busemann_histogram, coupling_view, eta_view};

#[test]
fn eta_view_shapes() {
    let v = eta_view(3, 2, vec![1.0, 4.0], 5).unwrap();
    assert_eq!(v.weights.len(), v.width * v.height);
    assert_eq!(v.zero.len(), v.weights.len());
    assert_eq!(v.terminals.len(), 2);
    assert_eq!(v.geodesic.first(), Some(&(1, 1)));
    assert_eq!(v.geodesic.last(), Some(&v.terminals[0]));
    for (i, z) in v.zero.iter().enumerate() {
        if *z {
            assert_eq!(v.weights[i], 0.0);
        }
    }
}

#[test]
fn histogram_counts_and_expectation() {
    let h = busemann_histogram(1.0, 4000, 20, 9).unwrap();
    assert!((h.zeta - 0.5).abs() < 1e-12);
    let counted: usize = h.counts.iter().sum();
    let expected: f64 = h.expected.iter().sum();
    assert!(counted <= 4000);
    assert!((expected - 4000.0 * (1.0 - (-5.0f64).exp())).abs() < 1e-6);
    assert!((h.mean - 2.0).abs() < 0.2, "mean {}", h.mean);
}

#[test]
fn coupling_conserves_column_sums() {
    let c = coupling_view(50, 1.0, 1.5, 3).unwrap();
    for t in 0..50 {
        let before = c.row1[t] + c.row2[t];
        let after = c.swapped1[t] + c.swapped2[t];
        assert!((before - after).abs() <= 1e-12 * before.max(1.0));
    }
    assert_eq!(c.queue.len(), 51);
    assert!(coupling_view(5, 0.0, 1.0, 1).is_err());
}
