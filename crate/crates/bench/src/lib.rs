//! Deterministic inputs shared by the benchmarks.

use sms_core::rng::{stream, tag, Rng};

/// Zero-heavy SMS-like samples: `n` values on a 0.05 grid, about
/// `zero_share` of them exactly zero.
pub fn sms_like(n: usize, zero_share: f64, seed: u64) -> Vec<f64> {
    let mut rng = stream(seed, &[tag("bench-sms")]);
    (0..n)
        .map(|_| if rng.random_bool(zero_share) { 0.0 } else { rng.random_range(1..=20) as f64 * 0.05 })
        .collect()
}

/// A smooth sequence with small seeded noise, for DTW.
pub fn trajectory(len: usize, phase: f64, seed: u64) -> Vec<f64> {
    let mut rng = stream(seed, &[tag("bench-trajectory")]);
    (0..len).map(|i| (i as f64 * 0.2 + phase).sin() + 0.01 * rng.random::<f64>()).collect()
}

/// Signed differences with distinct magnitudes, for the exact Wilcoxon.
pub fn differences(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = stream(seed, &[tag("bench-diffs")]);
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

/// An `n x k` matrix of SMS-like rows.
pub fn matrix(n: usize, k: usize, seed: u64) -> Vec<Vec<f64>> {
    (0..n).map(|i| sms_like(k, 0.5, seed + i as u64)).collect()
}
