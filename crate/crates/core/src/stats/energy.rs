use std::ops::{Add, Mul};

use rand::seq::SliceRandom;

use super::{map_indices, permutation_p_value, JointSample, TestReport, SIGNIFICANCE};
use crate::error::{LppError, Result};
use crate::rng::RngStream;

/// Above this many entries distance matrices are kept in single precision.
pub(crate) const F32_MATRIX_ENTRIES: usize = 10_000_000;

pub(crate) trait Entry: Copy + Default + Send + Sync + Add<Output = Self> + Mul<Output = Self> {
    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
}

impl Entry for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(self) -> f64 {
        self
    }
}

impl Entry for f32 {
    fn from_f64(x: f64) -> Self {
        x as f32
    }
    fn to_f64(self) -> f64 {
        self as f64
    }
}

/// `Σ row_j mask_j` with eight independent partial sums so the loop vectorises.
pub(crate) fn masked_sum<T: Entry>(row: &[T], mask: &[T]) -> f64 {
    let mut acc = [T::default(); 8];
    let chunks = row.len() / 8;
    for c in 0..chunks {
        let (r, m) = (&row[c * 8..c * 8 + 8], &mask[c * 8..c * 8 + 8]);
        for k in 0..8 {
            acc[k] = acc[k] + r[k] * m[k];
        }
    }
    let mut total: f64 = acc.iter().map(|v| v.to_f64()).sum();
    for j in chunks * 8..row.len() {
        total += (row[j] * mask[j]).to_f64();
    }
    total
}

fn euclid(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

/// V-statistic `2 E|X - Y| - E|X - X'| - E|Y - Y'|`.
pub fn energy_distance(a: &JointSample, b: &JointSample) -> Result<f64> {
    check(a, b)?;
    let mean = |p: &JointSample, q: &JointSample| {
        let mut s = 0.0;
        for i in 0..p.len() {
            for j in 0..q.len() {
                s += euclid(p.row(i), q.row(j));
            }
        }
        s / (p.len() * q.len()) as f64
    };
    Ok(2.0 * mean(a, b) - mean(a, a) - mean(b, b))
}

fn check(a: &JointSample, b: &JointSample) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(LppError::invalid(format!("dimension mismatch: {} vs {}", a.dim(), b.dim())));
    }
    if a.is_empty() || b.is_empty() {
        return Err(LppError::invalid("energy distance needs non-empty samples"));
    }
    Ok(())
}

/// Energy-distance two-sample test with a label-permutation p-value.
///
/// Each shuffle draws from its own stream derived from `seed`, so the p-value does not depend on
/// how shuffles are scheduled across threads.
pub fn energy_distance_test(
    a: &JointSample,
    b: &JointSample,
    permutations: usize,
    seed: u64,
) -> Result<TestReport> {
    check(a, b)?;
    let total = a.len() + b.len();
    let rows: Vec<&[f64]> = (0..a.len()).map(|i| a.row(i)).chain((0..b.len()).map(|i| b.row(i))).collect();
    let (stat, p) = if total * total > F32_MATRIX_ENTRIES {
        run::<f32>(&rows, a.len(), permutations, seed)
    } else {
        run::<f64>(&rows, a.len(), permutations, seed)
    };
    Ok(TestReport::permutation("energy-distance", stat, p, SIGNIFICANCE, vec![a.len(), b.len()])
        .with_seed(seed))
}

fn run<T: Entry>(rows: &[&[f64]], n: usize, permutations: usize, seed: u64) -> (f64, f64) {
    let total = rows.len();
    let m = total - n;
    let mut dist = vec![T::default(); total * total];
    for i in 0..total {
        for j in 0..i {
            let d = T::from_f64(euclid(rows[i], rows[j]));
            dist[i * total + j] = d;
            dist[j * total + i] = d;
        }
    }
    let row_sums: Vec<f64> = (0..total).map(|i| dist[i * total..(i + 1) * total].iter().map(|v| v.to_f64()).sum()).collect();
    let grand: f64 = row_sums.iter().sum();
    let statistic = |first: &[usize]| {
        let mut mask = vec![T::default(); total];
        for &i in first {
            mask[i] = T::from_f64(1.0);
        }
        let mut s_aa = 0.0;
        let mut r_a = 0.0;
        for &i in first {
            s_aa += masked_sum(&dist[i * total..(i + 1) * total], &mask);
            r_a += row_sums[i];
        }
        let s_ab = r_a - s_aa;
        let s_bb = grand - s_aa - 2.0 * s_ab;
        let (nf, mf) = (n as f64, m as f64);
        2.0 * s_ab / (nf * mf) - s_aa / (nf * nf) - s_bb / (mf * mf)
    };
    let identity: Vec<usize> = (0..n).collect();
    let observed = statistic(&identity);
    let root = RngStream::new(seed).fork("energy-permutations");
    let permuted = map_indices(permutations, |b| {
        let mut idx: Vec<usize> = (0..total).collect();
        idx.shuffle(&mut root.replica(b as u64).sequential());
        statistic(&idx[..n])
    });
    (observed, permutation_p_value(observed, &permuted))
}
