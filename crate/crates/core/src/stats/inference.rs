//! Sign test, dispersion, Friedman with Kendall's W, multiplicity
//! corrections and rank correlation.

use super::midranks;
use crate::error::{HarnessError, Result};
use crate::rng::{stream, tag, Rng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Binomial, ChiSquared, ContinuousCDF, DiscreteCDF};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignTest {
    pub positives: usize,
    pub total: usize,
    pub p: f64,
}

/// Exact one-sided sign test for a positive direction. Zeros count as
/// non-positive.
pub fn sign_test(deltas: &[f64]) -> Result<SignTest> {
    if deltas.is_empty() {
        return Err(HarnessError::EmptySample);
    }
    let n = deltas.len();
    let k = deltas.iter().filter(|&&d| d > 0.0).count();
    let p = if k == 0 {
        1.0
    } else {
        let b = Binomial::new(0.5, n as u64).expect("valid binomial");
        b.sf(k as u64 - 1)
    };
    Ok(SignTest { positives: k, total: n, p })
}

/// Population standard deviation over the absolute mean.
pub fn coefficient_of_variation(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(HarnessError::EmptySample);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if mean.abs() <= f64::EPSILON * scale || mean == 0.0 {
        return Err(HarnessError::ZeroMean);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    Ok(var.sqrt() / mean.abs())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FriedmanResult {
    pub chi2: f64,
    pub p: f64,
    pub kendalls_w: f64,
    pub rank_means: Vec<f64>,
    pub n: usize,
    pub k: usize,
}

/// Friedman test over `rows` (blocks) x columns (treatments), ranked within
/// rows with midranks and corrected for ties. A matrix whose every row is
/// constant has no rank variation: chi2 = 0, p = 1.
pub fn friedman(rows: &[Vec<f64>]) -> Result<FriedmanResult> {
    let n = rows.len();
    let k = rows.first().map_or(0, Vec::len);
    if n < 2 || k < 2 {
        return Err(HarnessError::DegenerateMatrix);
    }
    if let Some(r) = rows.iter().find(|r| r.len() != k) {
        return Err(HarnessError::LengthMismatch(k, r.len()));
    }
    let mut sums = vec![0.0; k];
    let mut ties = 0.0;
    for row in rows {
        let ranks = midranks(row);
        for (s, r) in sums.iter_mut().zip(&ranks) {
            *s += r;
        }
        let mut sorted = row.clone();
        sorted.sort_by(f64::total_cmp);
        let mut i = 0;
        while i < k {
            let j = (i..k).take_while(|&j| sorted[j] == sorted[i]).count();
            let t = j as f64;
            ties += t * t * t - t;
            i += j;
        }
    }
    let (nf, kf) = (n as f64, k as f64);
    let raw = 12.0 / (nf * kf * (kf + 1.0)) * sums.iter().map(|r| r * r).sum::<f64>() - 3.0 * nf * (kf + 1.0);
    let correction = 1.0 - ties / (nf * kf * (kf * kf - 1.0));
    let chi2 = if correction <= 0.0 { 0.0 } else { (raw / correction).max(0.0) };
    let p = ChiSquared::new(kf - 1.0).expect("positive df").sf(chi2);
    Ok(FriedmanResult {
        chi2,
        p: p.clamp(0.0, 1.0),
        kendalls_w: chi2 / (nf * (kf - 1.0)),
        rank_means: sums.iter().map(|s| s / nf).collect(),
        n,
        k,
    })
}

/// `min(1, p m)` elementwise.
pub fn bonferroni(pvals: &[f64], m: usize) -> Result<Vec<f64>> {
    if m == 0 {
        return Err(HarnessError::InvalidArgument("bonferroni needs m >= 1".into()));
    }
    Ok(pvals.iter().map(|p| (p * m as f64).min(1.0)).collect())
}

/// Benjamini-Hochberg step-up rejections at false-discovery rate `alpha`.
pub fn bh_fdr(pvals: &[f64], alpha: f64) -> Result<Vec<bool>> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(HarnessError::InvalidArgument(format!("alpha {alpha} outside (0, 1)")));
    }
    let m = pvals.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| pvals[a].total_cmp(&pvals[b]));
    let cut = (0..m).rev().find(|&i| pvals[order[i]] <= (i + 1) as f64 / m as f64 * alpha);
    let mut reject = vec![false; m];
    if let Some(c) = cut {
        for &i in &order[..=c] {
            reject[i] = true;
        }
    }
    Ok(reject)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Correlation {
    pub rho: f64,
    pub tau: f64,
    pub p_rho: f64,
    pub p_tau: f64,
    pub n: usize,
    /// Whether the p-values come from full enumeration.
    pub exact: bool,
}

/// Up to this many points the permutation distribution is enumerated.
pub const EXACT_PERMUTATION_LIMIT: usize = 8;
pub const MONTE_CARLO_PERMUTATIONS: usize = 20_000;

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
    if va == 0.0 || vb == 0.0 {
        0.0
    } else {
        cov / (va * vb).sqrt()
    }
}

/// Kendall's tau-b.
fn tau_b(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len();
    let (mut s, mut tx, mut ty, mut pairs) = (0i64, 0i64, 0i64, 0i64);
    for i in 0..n {
        for j in i + 1..n {
            let dx = (x[i] - x[j]).partial_cmp(&0.0).map_or(0, |o| o as i64);
            let dy = (y[i] - y[j]).partial_cmp(&0.0).map_or(0, |o| o as i64);
            s += dx * dy;
            tx += (dx == 0) as i64;
            ty += (dy == 0) as i64;
            pairs += 1;
        }
    }
    let denom = (((pairs - tx) * (pairs - ty)) as f64).sqrt();
    if denom == 0.0 {
        0.0
    } else {
        s as f64 / denom
    }
}

/// Calls `f` on every permutation of `v` (Heap's algorithm).
fn for_each_permutation(v: &mut [f64], f: &mut impl FnMut(&[f64])) {
    let n = v.len();
    let mut c = vec![0usize; n];
    f(v);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                v.swap(0, i);
            } else {
                v.swap(c[i], i);
            }
            f(v);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// Spearman's rho on midranks and Kendall's tau-b, with two-sided
/// permutation p-values.
pub fn spearman_kendall(x: &[f64], y: &[f64]) -> Result<Correlation> {
    spearman_kendall_seeded(x, y, 42)
}

pub fn spearman_kendall_seeded(x: &[f64], y: &[f64], seed: u64) -> Result<Correlation> {
    if x.len() != y.len() {
        return Err(HarnessError::LengthMismatch(x.len(), y.len()));
    }
    let n = x.len();
    if n < 3 {
        return Err(HarnessError::InvalidArgument(format!("correlation needs 3 points, got {n}")));
    }
    let rx = midranks(x);
    let ry = midranks(y);
    let rho = pearson(&rx, &ry);
    let tau = tau_b(x, y);
    // ties in the permutation statistics are matched up to rounding noise
    let hit = |obs: f64, v: f64| v.abs() >= obs.abs() - 1e-12;
    let (exact, p_rho, p_tau) = if n <= EXACT_PERMUTATION_LIMIT {
        let (mut hr, mut ht, mut total) = (0u64, 0u64, 0u64);
        let mut perm = ry.clone();
        let mut ys = y.to_vec();
        // permute rank and raw vectors together via an index permutation
        let mut idx: Vec<f64> = (0..n).map(|i| i as f64).collect();
        for_each_permutation(&mut idx, &mut |p| {
            for (slot, &i) in p.iter().enumerate() {
                perm[slot] = ry[i as usize];
                ys[slot] = y[i as usize];
            }
            hr += hit(rho, pearson(&rx, &perm)) as u64;
            ht += hit(tau, tau_b(x, &ys)) as u64;
            total += 1;
        });
        (true, hr as f64 / total as f64, ht as f64 / total as f64)
    } else {
        let (hr, ht) = (0..MONTE_CARLO_PERMUTATIONS)
            .into_par_iter()
            .map(|i| {
                let mut rng = stream(seed, &[tag("permutation"), i as u64]);
                let mut order: Vec<usize> = (0..n).collect();
                for j in (1..n).rev() {
                    order.swap(j, rng.random_range(0..=j));
                }
                let pr: Vec<f64> = order.iter().map(|&i| ry[i]).collect();
                let py: Vec<f64> = order.iter().map(|&i| y[i]).collect();
                (hit(rho, pearson(&rx, &pr)) as u64, hit(tau, tau_b(x, &py)) as u64)
            })
            .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
        let m = MONTE_CARLO_PERMUTATIONS as f64;
        (false, (hr as f64 + 1.0) / (m + 1.0), (ht as f64 + 1.0) / (m + 1.0))
    };
    Ok(Correlation { rho, tau, p_rho, p_tau, n, exact })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn sign_test_tails() {
        let t = sign_test(&[0.1, 0.2, 0.3, 0.4]).unwrap();
        assert_eq!((t.positives, t.total), (4, 4));
        assert!((t.p - 0.0625).abs() < 1e-12);
        let t = sign_test(&[0.1, 0.2, -0.3, 0.4]).unwrap();
        assert!((t.p - 0.3125).abs() < 1e-12);
        assert_eq!(sign_test(&[-1.0, -1.0, -1.0, -1.0]).unwrap().p, 1.0);
        // a zero counts against the direction
        assert_eq!(sign_test(&[0.1, 0.2, 0.0, 0.4]).unwrap().positives, 3);
        assert_eq!(sign_test(&[]), Err(HarnessError::EmptySample));
    }

    #[test]
    fn cv_fixtures() {
        assert_eq!(coefficient_of_variation(&[1.0; 4]).unwrap(), 0.0);
        assert_eq!(coefficient_of_variation(&[1.0, -1.0]), Err(HarnessError::ZeroMean));
        // mean 0.2, deviations (0, -0.1, 0.1, 0): variance 0.005
        let cv = coefficient_of_variation(&[0.2, 0.1, 0.3, 0.2]).unwrap();
        assert!((cv - 0.005f64.sqrt() / 0.2).abs() < 1e-12);
    }

    #[test]
    fn friedman_extremes() {
        let flat = vec![vec![0.0; 5]; 12];
        let r = friedman(&flat).unwrap();
        assert_eq!((r.chi2, r.kendalls_w), (0.0, 0.0));
        let concordant: Vec<Vec<f64>> = (0..12).map(|i| (0..5).map(|j| j as f64 + 0.01 * i as f64).collect()).collect();
        let r = friedman(&concordant).unwrap();
        assert!((r.chi2 - 48.0).abs() < 1e-12);
        assert!((r.kendalls_w - 1.0).abs() < 1e-12);
        assert_eq!(r.rank_means, vec![1.0, 2.0, 3.0, 4.0, 5.0]);
        assert_eq!(friedman(&[vec![1.0, 2.0]]), Err(HarnessError::DegenerateMatrix));
        assert_eq!(friedman(&[vec![1.0], vec![2.0]]), Err(HarnessError::DegenerateMatrix));
    }

    #[test]
    fn friedman_hand_ranked() {
        // rank sums 4, 6, 8: 12/(3*3*4) * 116 - 36
        let r = friedman(&[vec![1.0, 2.0, 3.0], vec![2.0, 1.0, 3.0], vec![1.0, 3.0, 2.0]]).unwrap();
        assert!((r.chi2 - 8.0 / 3.0).abs() < 1e-12);
        assert!((r.p - 0.26359713811572705).abs() < 1e-9);
    }

    #[test]
    fn friedman_with_ties_matches_the_corrected_statistic() {
        let m = vec![
            vec![0.1, 0.1, 0.3, 0.2],
            vec![0.0, 0.2, 0.2, 0.5],
            vec![0.4, 0.1, 0.3, 0.6],
            vec![0.2, 0.2, 0.2, 0.9],
        ];
        // reference values from scipy.stats.friedmanchisquare
        let r = friedman(&m).unwrap();
        assert!((r.chi2 - 7.147058823529416).abs() < 1e-9);
        assert!((r.p - 0.06735532356564851).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn friedman_w_identity(m in proptest::collection::vec(proptest::collection::vec(0u8..4, 4), 2..10)) {
            let rows: Vec<Vec<f64>> = m.into_iter().map(|r| r.into_iter().map(f64::from).collect()).collect();
            let r = friedman(&rows).unwrap();
            prop_assert!((0.0..=1.0 + 1e-12).contains(&r.kendalls_w));
            prop_assert!((r.chi2 - r.kendalls_w * (r.n * (r.k - 1)) as f64).abs() < 1e-12);
            prop_assert!((0.0..=1.0).contains(&r.p));
        }

        #[test]
        fn bh_rejects_a_superset_of_bonferroni(ps in proptest::collection::vec(0.0f64..0.2, 1..12)) {
            let bh = bh_fdr(&ps, 0.05).unwrap();
            let bf = bonferroni(&ps, ps.len()).unwrap();
            for (b, adj) in bh.iter().zip(&bf) {
                prop_assert!(*b || *adj > 0.05);
            }
        }

        #[test]
        fn sign_p_in_unit_interval(d in proptest::collection::vec(-1.0f64..1.0, 1..30)) {
            let t = sign_test(&d).unwrap();
            prop_assert!((0.0..=1.0).contains(&t.p));
        }
    }

    #[test]
    fn bonferroni_fixtures() {
        let adj = bonferroni(&[0.029, 0.5], 4).unwrap();
        assert!((adj[0] - 0.116).abs() < 1e-12);
        assert_eq!(adj[1], 1.0);
        assert_eq!(bonferroni(&[0.3, 0.01], 1).unwrap(), vec![0.3, 0.01]);
        assert!(bonferroni(&[0.3], 0).is_err());
    }

    #[test]
    fn bh_fixtures() {
        assert_eq!(bh_fdr(&[0.01], 0.05).unwrap(), vec![true]);
        assert_eq!(bh_fdr(&[1.0, 1.0, 1.0], 0.05).unwrap(), vec![false; 3]);
        // sorted thresholds 0.0125, 0.025, 0.0375, 0.05: 0.04 > 0.0375 but the
        // step-up keeps the largest passing rank, which is 2 (0.02 <= 0.025)
        assert_eq!(bh_fdr(&[0.01, 0.02, 0.04, 0.9], 0.05).unwrap(), vec![true, true, false, false]);
        assert_eq!(bh_fdr(&[0.01, 0.02, 0.03, 0.9], 0.05).unwrap(), vec![true, true, true, false]);
        assert!(bh_fdr(&[0.1], 1.0).is_err());
    }

    #[test]
    fn correlation_extremes() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let c = spearman_kendall(&x, &x).unwrap();
        assert_eq!((c.rho, c.tau), (1.0, 1.0));
        let rev: Vec<f64> = x.iter().rev().copied().collect();
        assert_eq!(spearman_kendall(&x, &rev).unwrap().rho, -1.0);
        assert_eq!(spearman_kendall(&x, &x[..5]), Err(HarnessError::LengthMismatch(6, 5)));
    }

    #[test]
    fn five_point_fixture() {
        // concordant minus discordant pairs over 10: (8 - 2) / 10
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        let y = [2.0, 1.0, 4.0, 3.0, 5.0];
        let c = spearman_kendall(&x, &y).unwrap();
        assert!((c.tau - 0.6).abs() < 1e-12);
        assert!((c.rho - 0.8).abs() < 1e-12);
        assert!(c.exact);
        // permutation counts by enumeration of all 120 orderings: 16 and 28
        assert!((c.p_rho - 16.0 / 120.0).abs() < 1e-12);
        assert!((c.p_tau - 28.0 / 120.0).abs() < 1e-12);
    }

    #[test]
    fn tied_correlation_matches_reference() {
        let x = [0.1, 0.4, 0.4, 0.9, 0.3, 0.7];
        let y = [1.0, 3.0, 2.0, 2.0, 0.0, 5.0];
        // scipy.stats.spearmanr / kendalltau
        let c = spearman_kendall(&x, &y).unwrap();
        assert!((c.rho - 0.6617647058823529).abs() < 1e-12);
        assert!((c.tau - 0.5).abs() < 1e-12);
    }

    #[test]
    fn monte_carlo_p_is_reproducible() {
        let x: Vec<f64> = (0..12).map(|i| (i * 7 % 12) as f64).collect();
        let y: Vec<f64> = (0..12).map(|i| i as f64).collect();
        let a = spearman_kendall(&x, &y).unwrap();
        assert!(!a.exact);
        assert_eq!(a, spearman_kendall(&x, &y).unwrap());
        assert!((0.0..=1.0).contains(&a.p_rho) && (0.0..=1.0).contains(&a.p_tau));
    }
}
