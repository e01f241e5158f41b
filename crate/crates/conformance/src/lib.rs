//! Shared fixtures for the acceptance suite.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sgrow::{Sgr, StreamLog};

/// Rating-like synthetic initial graph: uniform users and items, weights in
/// 1..=5, ten records per timestamp.
pub fn synthetic_g0(n: usize, seed: u64) -> StreamLog {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|k| {
            Sgr::new(
                rng.random_range(0..300),
                rng.random_range(0..200),
                rng.random_range(1..=5),
                (k / 10) as u64,
            )
        })
        .collect()
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut r = vec![0.0; v.len()];
    let mut k = 0;
    while k < idx.len() {
        let mut end = k;
        while end + 1 < idx.len() && v[idx[end + 1]] == v[idx[k]] {
            end += 1;
        }
        let avg = (k + end) as f64 / 2.0 + 1.0;
        for &x in &idx[k..=end] {
            r[x] = avg;
        }
        k = end + 1;
    }
    r
}

/// Rank correlation with average ranks for ties.
pub fn spearman(xs: &[f64], ys: &[f64]) -> f64 {
    sgrow::metrics::pearson(&ranks(xs), &ranks(ys)).unwrap_or(f64::NAN)
}
