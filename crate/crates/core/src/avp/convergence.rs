//! Observed convergence order from an error sequence.

use crate::error::{HarnessError, Result};

/// `errors` holds `(h, e)` pairs with `h` shrinking by a constant factor.
/// Returns the mean observed order over consecutive pairs and the residual
/// ratio `e(h_last) / e(h_prev)` of the finest pair.
pub fn convergence_order(errors: &[(f64, f64)]) -> Result<(f64, f64)> {
    if errors.len() < 3 {
        return Err(HarnessError::IrregularRefinement);
    }
    if errors.iter().any(|&(_, e)| !(e > 0.0) || !e.is_finite()) {
        return Err(HarnessError::NonPositiveError);
    }
    let factor = errors[0].0 / errors[1].0;
    if !(factor > 1.0) || !factor.is_finite() {
        return Err(HarnessError::IrregularRefinement);
    }
    for w in errors.windows(2) {
        let f = w[0].0 / w[1].0;
        if (f - factor).abs() > 1e-9 * factor {
            return Err(HarnessError::IrregularRefinement);
        }
    }
    let log_factor = factor.ln();
    let orders: Vec<f64> = errors.windows(2).map(|w| (w[0].1 / w[1].1).ln() / log_factor).collect();
    let observed = orders.iter().sum::<f64>() / orders.len() as f64;
    let n = errors.len();
    Ok((observed, errors[n - 1].1 / errors[n - 2].1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_laws_are_recovered_exactly() {
        for p in 1..=4 {
            let e: Vec<(f64, f64)> = [0.1, 0.05, 0.025].iter().map(|&h: &f64| (h, h.powi(p))).collect();
            let (order, ratio) = convergence_order(&e).unwrap();
            assert!((order - p as f64).abs() < 1e-12, "p={p}: {order}");
            assert!((ratio - 0.5f64.powi(p)).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert_eq!(convergence_order(&[(0.1, 1.0), (0.05, 0.5)]), Err(HarnessError::IrregularRefinement));
        assert_eq!(
            convergence_order(&[(0.1, 1.0), (0.05, 0.0), (0.025, 0.1)]),
            Err(HarnessError::NonPositiveError)
        );
        assert_eq!(
            convergence_order(&[(0.1, 1.0), (0.05, 0.5), (0.01, 0.1)]),
            Err(HarnessError::IrregularRefinement)
        );
    }
}
