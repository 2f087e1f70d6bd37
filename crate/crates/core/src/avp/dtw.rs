//! Dynamic time warping with absolute-difference local cost and no band.

use crate::error::{HarnessError, Result};

pub fn dtw_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(HarnessError::EmptySequence);
    }
    let m = b.len();
    let mut prev = vec![f64::INFINITY; m + 1];
    let mut cur = vec![f64::INFINITY; m + 1];
    prev[0] = 0.0;
    for &ai in a {
        cur[0] = f64::INFINITY;
        for j in 1..=m {
            let best = prev[j].min(cur[j - 1]).min(prev[j - 1]);
            cur[j] = (ai - b[j - 1]).abs() + best;
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    Ok(prev[m])
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Minimum cost over every monotone, continuous alignment path.
    fn exhaustive(a: &[f64], b: &[f64]) -> f64 {
        fn walk(a: &[f64], b: &[f64], i: usize, j: usize) -> f64 {
            let here = (a[i] - b[j]).abs();
            if i == a.len() - 1 && j == b.len() - 1 {
                return here;
            }
            let mut best = f64::INFINITY;
            if i + 1 < a.len() {
                best = best.min(walk(a, b, i + 1, j));
            }
            if j + 1 < b.len() {
                best = best.min(walk(a, b, i, j + 1));
            }
            if i + 1 < a.len() && j + 1 < b.len() {
                best = best.min(walk(a, b, i + 1, j + 1));
            }
            here + best
        }
        walk(a, b, 0, 0)
    }

    #[test]
    fn spec_fixture() {
        assert_eq!(dtw_distance(&[1.0, 2.0, 3.0], &[1.0, 3.0]).unwrap(), 1.0);
        assert_eq!(exhaustive(&[1.0, 2.0, 3.0], &[1.0, 3.0]), 1.0);
    }

    #[test]
    fn identical_sequences_have_zero_distance() {
        let a = [0.3, -1.0, 2.5, 2.5];
        assert_eq!(dtw_distance(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn empty_input_is_an_error() {
        assert_eq!(dtw_distance(&[], &[1.0]), Err(HarnessError::EmptySequence));
    }

    proptest! {
        #[test]
        fn matches_exhaustive_alignment(
            a in prop::collection::vec(-10.0f64..10.0, 1..=6),
            b in prop::collection::vec(-10.0f64..10.0, 1..=6),
        ) {
            let fast = dtw_distance(&a, &b).unwrap();
            let slow = exhaustive(&a, &b);
            prop_assert!((fast - slow).abs() <= 1e-12 * (1.0 + slow), "{} vs {}", fast, slow);
        }

        #[test]
        fn symmetric_and_nonnegative(
            a in prop::collection::vec(-10.0f64..10.0, 1..40),
            b in prop::collection::vec(-10.0f64..10.0, 1..40),
        ) {
            let ab = dtw_distance(&a, &b).unwrap();
            prop_assert!(ab >= 0.0);
            prop_assert_eq!(ab, dtw_distance(&b, &a).unwrap());
        }
    }
}
