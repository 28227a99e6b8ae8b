use rand::seq::SliceRandom;

use super::energy::{Entry, F32_MATRIX_ENTRIES};
use super::{map_indices, permutation_p_value, Sample, TestReport, SIGNIFICANCE};
use crate::error::{LppError, Result};
use crate::rng::RngStream;

fn centered<T: Entry>(x: &[f64]) -> Vec<T> {
    let n = x.len();
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            d[i * n + j] = (x[i] - x[j]).abs();
        }
    }
    let row: Vec<f64> = (0..n).map(|i| d[i * n..(i + 1) * n].iter().sum::<f64>() / n as f64).collect();
    let grand = row.iter().sum::<f64>() / n as f64;
    (0..n * n)
        .map(|k| {
            let (i, j) = (k / n, k % n);
            T::from_f64(d[k] - row[i] - row[j] + grand)
        })
        .collect()
}

fn dot<T: Entry>(a: &[T], b: &[T]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (*x * *y).to_f64()).sum()
}

/// Sample distance correlation; 0 when either input is constant.
pub fn distance_correlation(x: &Sample, y: &Sample) -> Result<f64> {
    check(x, y)?;
    let (a, b) = (centered::<f64>(x.values()), centered::<f64>(y.values()));
    let (vx, vy) = (dot(&a, &a), dot(&b, &b));
    if vx <= 0.0 || vy <= 0.0 {
        return Ok(0.0);
    }
    Ok((dot(&a, &b).max(0.0) / (vx * vy).sqrt()).sqrt())
}

fn check(x: &Sample, y: &Sample) -> Result<()> {
    if x.len() != y.len() {
        return Err(LppError::invalid(format!("paired samples differ in length: {} vs {}", x.len(), y.len())));
    }
    if x.len() < 2 {
        return Err(LppError::invalid("independence test needs at least two pairs"));
    }
    Ok(())
}

/// Distance-correlation independence test; the p-value permutes the pairing of `y`.
pub fn independence_test(x: &Sample, y: &Sample, permutations: usize, seed: u64) -> Result<TestReport> {
    check(x, y)?;
    let n = x.len();
    let (stat, p) = if n * n > F32_MATRIX_ENTRIES {
        run::<f32>(x.values(), y.values(), permutations, seed)
    } else {
        run::<f64>(x.values(), y.values(), permutations, seed)
    };
    Ok(TestReport::permutation("distance-correlation", stat, p, SIGNIFICANCE, vec![n]).with_seed(seed))
}

fn run<T: Entry>(x: &[f64], y: &[f64], permutations: usize, seed: u64) -> (f64, f64) {
    let n = x.len();
    let (a, b) = (centered::<T>(x), centered::<T>(y));
    let (vx, vy) = (dot(&a, &a), dot(&b, &b));
    if vx <= 0.0 || vy <= 0.0 {
        return (0.0, 1.0);
    }
    let observed = dot(&a, &b);
    let root = RngStream::new(seed).fork("dcor-permutations");
    let permuted = map_indices(permutations, |k| {
        let mut pi: Vec<usize> = (0..n).collect();
        pi.shuffle(&mut root.replica(k as u64).sequential());
        let mut s = 0.0;
        for i in 0..n {
            let ra = &a[i * n..(i + 1) * n];
            let rb = &b[pi[i] * n..(pi[i] + 1) * n];
            let mut acc = T::default();
            for j in 0..n {
                acc = acc + ra[j] * rb[pi[j]];
            }
            s += acc.to_f64();
        }
        s
    });
    let dcor = (observed.max(0.0) / (vx * vy).sqrt()).sqrt();
    (dcor, permutation_p_value(observed, &permuted))
}
