//! Wilcoxon signed-rank test.
//!
//! Zero differences are discarded, tied magnitudes get midranks. The null
//! distribution is enumerated exactly for `n <= 25` (by dynamic programming
//! over doubled ranks, so midranks stay integral); above that a normal
//! approximation with tie and continuity corrections is used.

use crate::error::{HarnessError, Result};
use crate::numeric::phi;
use serde::{Deserialize, Serialize};

/// Differences with magnitude at or below this are treated as zero.
pub const ZERO_TOL: f64 = 1e-12;

/// Largest sample size for which the exact distribution is used.
pub const EXACT_MAX_N: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Alternative {
    /// Differences tend to be positive.
    Greater,
    Less,
    TwoSided,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WilcoxonResult {
    /// Nonzero differences used.
    pub n: usize,
    pub w_plus: f64,
    pub w_minus: f64,
    pub p_value: f64,
    pub exact: bool,
}

/// Midranks of `values` (1-based).
pub fn midranks(values: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && values[idx[j + 1]] == values[idx[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

/// Signed-rank test of the differences. Errors when no nonzero difference
/// remains.
pub fn signed_rank_test(diffs: &[f64], alternative: Alternative) -> Result<WilcoxonResult> {
    let nz: Vec<f64> = diffs.iter().copied().filter(|d| d.abs() > ZERO_TOL).collect();
    if nz.is_empty() {
        return Err(HarnessError::DegenerateSample);
    }
    let n = nz.len();
    let ranks = midranks(&nz.iter().map(|d| d.abs()).collect::<Vec<_>>());
    let w_plus: f64 = nz.iter().zip(&ranks).filter(|(d, _)| **d > 0.0).map(|(_, r)| r).sum();
    let total = n as f64 * (n as f64 + 1.0) / 2.0;
    let w_minus = total - w_plus;
    let (p_upper, p_lower, exact) = if n <= EXACT_MAX_N {
        let (up, lo) = exact_tails(&ranks, w_plus);
        (up, lo, true)
    } else {
        let (up, lo) = normal_tails(&ranks, w_plus);
        (up, lo, false)
    };
    let p = match alternative {
        Alternative::Greater => p_upper,
        Alternative::Less => p_lower,
        Alternative::TwoSided => (2.0 * p_upper.min(p_lower)).min(1.0),
    };
    Ok(WilcoxonResult { n, w_plus, w_minus, p_value: p.clamp(0.0, 1.0), exact })
}

/// `(P(W+ >= w), P(W+ <= w))` under the permutation null, by enumerating
/// sign assignments over the (possibly tied) ranks.
fn exact_tails(ranks: &[f64], w_plus: f64) -> (f64, f64) {
    let doubled: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
    let max: usize = doubled.iter().sum();
    let mut counts = vec![0.0f64; max + 1];
    counts[0] = 1.0;
    let mut reach = 0;
    for &r in &doubled {
        for s in (0..=reach).rev() {
            if counts[s] != 0.0 {
                counts[s + r] += counts[s];
            }
        }
        reach += r;
    }
    let total = 2f64.powi(ranks.len() as i32);
    let w = (2.0 * w_plus).round() as usize;
    let upper: f64 = counts[w..].iter().sum();
    let lower: f64 = counts[..=w].iter().sum();
    (upper / total, lower / total)
}

fn normal_tails(ranks: &[f64], w_plus: f64) -> (f64, f64) {
    let n = ranks.len() as f64;
    let mean = n * (n + 1.0) / 4.0;
    let mut sorted = ranks.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j + 1 < sorted.len() && sorted[j + 1] == sorted[i] {
            j += 1;
        }
        let t = (j - i + 1) as f64;
        tie_term += t * t * t - t;
        i = j + 1;
    }
    let var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
    if var <= 0.0 {
        return (1.0, 1.0);
    }
    let sd = var.sqrt();
    let z_up = (w_plus - mean - 0.5) / sd;
    let z_lo = (w_plus - mean + 0.5) / sd;
    (1.0 - phi(z_up), phi(z_lo))
}
