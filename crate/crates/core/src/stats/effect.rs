//! Cliff's delta, its bootstrap interval, Romano's magnitude labels and the
//! two odds-ratio readings of aligned vs cross SMS.

use crate::error::{HarnessError, Result};
use crate::rng::{stream, tag, Rng};
use crate::sentinel;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Dominance counts: `(#{x > y}, #{x < y})` over all pairs.
fn dominance(a: &[f64], b: &[f64]) -> (u64, u64) {
    let mut gt = 0;
    let mut lt = 0;
    for x in a {
        for y in b {
            if x > y {
                gt += 1;
            } else if x < y {
                lt += 1;
            }
        }
    }
    (gt, lt)
}

fn delta_unchecked(a: &[f64], b: &[f64]) -> f64 {
    let (gt, lt) = dominance(a, b);
    (gt as f64 - lt as f64) / (a.len() * b.len()) as f64
}

/// Cliff's delta of `a` over `b`.
pub fn cliffs_delta(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(HarnessError::EmptySample);
    }
    Ok(delta_unchecked(a, b))
}

/// Whether `map` leaves delta exactly unchanged. `map` must be strictly
/// increasing over the pooled values.
pub fn rank_invariance_check(a: &[f64], b: &[f64], map: impl Fn(f64) -> f64) -> bool {
    let (ma, mb): (Vec<f64>, Vec<f64>) = (a.iter().map(|&x| map(x)).collect(), b.iter().map(|&x| map(x)).collect());
    match (cliffs_delta(a, b), cliffs_delta(&ma, &mb)) {
        (Ok(d), Ok(m)) => d == m,
        _ => false,
    }
}

/// Linear-interpolated quantile of sorted data.
pub(crate) fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

pub(crate) fn resample(rng: &mut impl Rng, xs: &[f64]) -> Vec<f64> {
    (0..xs.len()).map(|_| xs[rng.random_range(0..xs.len())]).collect()
}

/// Percentile 95% interval of delta over `iterations` joint resamples.
/// Iteration `i` draws from its own stream, so the interval does not depend
/// on the thread count.
pub fn bootstrap_ci(a: &[f64], b: &[f64], iterations: usize, seed: u64) -> Result<(f64, f64)> {
    if a.is_empty() || b.is_empty() {
        return Err(HarnessError::EmptySample);
    }
    if iterations < 100 {
        return Err(HarnessError::InvalidArgument(format!("{iterations} bootstrap iterations, need at least 100")));
    }
    let mut deltas: Vec<f64> = (0..iterations)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(seed, &[tag("bootstrap"), i as u64]);
            let ra = resample(&mut rng, a);
            let rb = resample(&mut rng, b);
            delta_unchecked(&ra, &rb)
        })
        .collect();
    deltas.sort_by(f64::total_cmp);
    Ok((quantile(&deltas, 0.025), quantile(&deltas, 0.975)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Magnitude {
    Negligible,
    Small,
    Medium,
    Large,
}

pub const ROMANO_SMALL: f64 = 0.147;
pub const ROMANO_MEDIUM: f64 = 0.330;
pub const ROMANO_LARGE: f64 = 0.474;

/// Romano et al. labels; each threshold is inclusive.
pub fn romano_classify(delta: f64) -> Magnitude {
    let d = delta.abs();
    if d >= ROMANO_LARGE {
        Magnitude::Large
    } else if d >= ROMANO_MEDIUM {
        Magnitude::Medium
    } else if d >= ROMANO_SMALL {
        Magnitude::Small
    } else {
        Magnitude::Negligible
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectSizeReport {
    pub delta: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub bootstrap_iterations: usize,
    pub classification: Magnitude,
}

pub fn effect_size(a: &[f64], b: &[f64], iterations: usize, seed: u64) -> Result<EffectSizeReport> {
    let delta = cliffs_delta(a, b)?;
    let (ci_low, ci_high) = bootstrap_ci(a, b, iterations, seed)?;
    Ok(EffectSizeReport { delta, ci_low, ci_high, bootstrap_iterations: iterations, classification: romano_classify(delta) })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OddsRatios {
    /// Odds of a nonzero aligned SMS over odds of a nonzero cross SMS,
    /// every count shifted by 0.5.
    #[serde(with = "sentinel::extended")]
    pub nonzero_odds_ratio: f64,
    /// `median(aligned) / median(cross)`; infinite when only the cross
    /// median is zero, undefined when both are.
    #[serde(with = "sentinel::extended")]
    pub median_ratio: f64,
}

pub(crate) fn median(xs: &[f64]) -> f64 {
    let mut s = xs.to_vec();
    s.sort_by(f64::total_cmp);
    quantile(&s, 0.5)
}

pub fn odds_ratios(aligned: &[f64], cross: &[f64]) -> Result<OddsRatios> {
    if aligned.is_empty() || cross.is_empty() {
        return Err(HarnessError::EmptySample);
    }
    let odds = |xs: &[f64]| {
        let nz = xs.iter().filter(|&&x| x > 0.0).count() as f64;
        (nz + 0.5) / (xs.len() as f64 - nz + 0.5)
    };
    let (ma, mc) = (median(aligned), median(cross));
    let median_ratio = if mc == 0.0 {
        if ma > 0.0 {
            f64::INFINITY
        } else if ma < 0.0 {
            f64::NEG_INFINITY
        } else {
            f64::NAN
        }
    } else {
        ma / mc
    };
    Ok(OddsRatios { nonzero_odds_ratio: odds(aligned) / odds(cross), median_ratio })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn dominance_and_symmetry() {
        assert_eq!(cliffs_delta(&[1.0, 1.0, 1.0], &[0.0, 0.0, 0.0]).unwrap(), 1.0);
        assert_eq!(cliffs_delta(&[0.0], &[1.0]).unwrap(), -1.0);
        let a = [0.3, 0.1, 0.7, 0.7];
        assert_eq!(cliffs_delta(&a, &a).unwrap(), 0.0);
        assert_eq!(cliffs_delta(&[], &a), Err(HarnessError::EmptySample));
    }

    #[test]
    fn twelve_pair_fixture() {
        // pairs of a=[0.3,0,0.5] against b=[0,0.1,0,0.2]:
        // 0.3 beats all 4; 0 ties two zeros and loses to 0.1, 0.2; 0.5 beats all 4
        // gt = 8, lt = 2, delta = 6/12
        assert_eq!(cliffs_delta(&[0.3, 0.0, 0.5], &[0.0, 0.1, 0.0, 0.2]).unwrap(), 0.5);
    }

    fn brute(a: &[f64], b: &[f64]) -> f64 {
        let mut s = 0i64;
        for x in a {
            for y in b {
                s += (x > y) as i64 - (x < y) as i64;
            }
        }
        s as f64 / (a.len() * b.len()) as f64
    }

    proptest! {
        #[test]
        fn matches_pair_enumeration(
            a in proptest::collection::vec(0u8..6, 1..=20),
            b in proptest::collection::vec(0u8..6, 1..=20),
        ) {
            let a: Vec<f64> = a.into_iter().map(|v| v as f64 / 5.0).collect();
            let b: Vec<f64> = b.into_iter().map(|v| v as f64 / 5.0).collect();
            let d = cliffs_delta(&a, &b).unwrap();
            prop_assert_eq!(d, brute(&a, &b));
            prop_assert!((-1.0..=1.0).contains(&d));
        }

        #[test]
        fn invariant_under_monotone_maps(
            a in proptest::collection::vec(0.0f64..1.0, 1..15),
            b in proptest::collection::vec(0.0f64..1.0, 1..15),
            k in 0.1f64..5.0,
            c in -3.0f64..3.0,
        ) {
            prop_assert!(rank_invariance_check(&a, &b, |x| k * x + c));
            prop_assert!(rank_invariance_check(&a, &b, |x| (x + c.abs() + 0.1).ln()));
            prop_assert!(rank_invariance_check(&a, &b, |x| x * x * x));
        }
    }

    #[test]
    fn logit_of_clamped_sms_preserves_delta() {
        let clamp = |x: f64| x.clamp(1e-6, 1.0 - 1e-6);
        let logit = |x: f64| (clamp(x) / (1.0 - clamp(x))).ln();
        let a = [0.0, 0.2, 0.5, 1.0, 0.0];
        let b = [0.0, 0.0, 0.1, 0.9];
        assert!(rank_invariance_check(&a, &b, logit));
        assert!(rank_invariance_check(&a, &b, |x| x));
        assert!(rank_invariance_check(&a, &b, |x| 2.0 * x + 1.0));
    }

    #[test]
    fn bootstrap_degenerate_and_deterministic() {
        assert_eq!(bootstrap_ci(&[2.0; 5], &[1.0; 7], 200, 1).unwrap(), (1.0, 1.0));
        assert_eq!(bootstrap_ci(&[0.0; 5], &[1.0; 7], 200, 1).unwrap(), (-1.0, -1.0));
        let a = [0.1, 0.5, 0.0, 0.9, 0.3, 0.0];
        let b = [0.0, 0.2, 0.0, 0.4];
        assert_eq!(bootstrap_ci(&a, &b, 500, 9).unwrap(), bootstrap_ci(&a, &b, 500, 9).unwrap());
        assert!(bootstrap_ci(&a, &b, 99, 9).is_err());
        assert_eq!(bootstrap_ci(&a, &[], 100, 9), Err(HarnessError::EmptySample));
    }

    #[test]
    fn smaller_samples_give_wider_intervals() {
        let a: Vec<f64> = (0..12).map(|i| if i % 2 == 0 { 0.0 } else { 0.1 * i as f64 }).collect();
        let b: Vec<f64> = (0..12).map(|i| if i % 3 == 0 { 0.05 * i as f64 } else { 0.0 }).collect();
        let (l12, h12) = bootstrap_ci(&a, &b, 2000, 3).unwrap();
        let (l6, h6) = bootstrap_ci(&a[..6], &b[..6], 2000, 3).unwrap();
        assert!(h6 - l6 > h12 - l12, "n=6 width {} vs n=12 width {}", h6 - l6, h12 - l12);
    }

    #[test]
    fn romano_labels() {
        assert_eq!(romano_classify(0.474), Magnitude::Large);
        assert_eq!(romano_classify(0.35), Magnitude::Medium);
        assert_eq!(romano_classify(0.330), Magnitude::Medium);
        assert_eq!(romano_classify(0.323), Magnitude::Small);
        assert_eq!(romano_classify(-0.2), Magnitude::Small);
        assert_eq!(romano_classify(0.10), Magnitude::Negligible);
    }

    #[test]
    fn odds_ratio_fixtures() {
        let aligned: Vec<f64> = (0..12).map(|i| if i < 9 { 0.5 } else { 0.0 }).collect();
        let cross: Vec<f64> = (0..48).map(|i| if i < 6 { 0.2 } else { 0.0 }).collect();
        let r = odds_ratios(&aligned, &cross).unwrap();
        let expected = (9.5 / 3.5) / (6.5 / 42.5);
        assert!((r.nonzero_odds_ratio - expected).abs() < 1e-12);
        assert!((r.nonzero_odds_ratio - 17.75).abs() < 0.01);
        assert_eq!(r.median_ratio, f64::INFINITY);

        let same = odds_ratios(&cross, &cross).unwrap();
        assert_eq!(same.nonzero_odds_ratio, 1.0);
        assert!(same.median_ratio.is_nan());
        assert_eq!(odds_ratios(&[1.0, 3.0], &[2.0]).unwrap().median_ratio, 1.0);
        assert_eq!(odds_ratios(&[], &[1.0]), Err(HarnessError::EmptySample));
    }
}
