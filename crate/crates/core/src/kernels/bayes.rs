//! B1: Beta-Binomial conjugate posterior.
//!
//! Prior `Beta(alpha, beta)`, `n` trials, input `x` successes (real-valued,
//! the Beta function does not care). Output is the posterior mean computed
//! as a ratio of Beta functions, `B(a + k + 1, b + n - k) / B(a + k, b + n - k)`,
//! which is analytically `(a + k) / (a + b + n)`. Level `L` scales both `n`
//! and `k` by `2^L` (more data, same success fraction).

use super::{Domain, Model};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

pub(super) const DOMAIN: Domain = Domain::new(0.0, 20.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BetaBinomialFault {
    /// Return the numerator Beta function without dividing by the evidence.
    OmitNormalisation,
    /// Count successes as `k + shift`.
    ShiftedCount { shift: f64 },
    /// Count failures as `n - k + extra`.
    ExtraFailures { extra: f64 },
    /// Use `n - k` successes (data direction reversed).
    ReversedData,
    /// Use `min(k, n - k)` successes.
    FoldedCount,
    /// Report the posterior mode instead of the mean.
    ModeInsteadOfMean,
    /// Successes enter squared over `n`.
    SquaredCount,
    /// The data weight is not scaled with the level.
    StaleEvidence,
    /// Report `mean + coef * (mean - k/n)`, pushing past the data mean.
    Overshoot { coef: f64 },
    /// Discount the data by `factor` (power prior).
    PowerPrior { factor: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaBinomialConfig {
    pub alpha: f64,
    pub beta: f64,
    pub trials: f64,
    pub fault: Option<BetaBinomialFault>,
}

impl Default for BetaBinomialConfig {
    fn default() -> Self {
        BetaBinomialConfig { alpha: 2.0, beta: 2.0, trials: 20.0, fault: None }
    }
}

fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// Posterior mean of the success probability, by Beta-function ratio.
pub fn posterior_mean(alpha: f64, beta: f64, n: f64, k: f64) -> f64 {
    let a = alpha + k;
    let b = beta + n - k;
    (ln_beta(a + 1.0, b) - ln_beta(a, b)).exp()
}

pub struct BetaBinomial<'a> {
    cfg: &'a BetaBinomialConfig,
    scale: f64,
}

impl BetaBinomialConfig {
    pub fn fit(&self, level: u32) -> BetaBinomial<'_> {
        let scale = match self.fault {
            Some(BetaBinomialFault::StaleEvidence) => 1.0,
            _ => (1u64 << level) as f64,
        };
        BetaBinomial { cfg: self, scale }
    }
}

impl Model for BetaBinomial<'_> {
    fn eval(&self, x: f64) -> f64 {
        let c = self.cfg;
        let n = c.trials * self.scale;
        let mut k = x * self.scale;
        let mut failures = n - k;
        let mut weight = 1.0;
        match c.fault {
            Some(BetaBinomialFault::ShiftedCount { shift }) => k += shift,
            Some(BetaBinomialFault::ExtraFailures { extra }) => failures += extra,
            Some(BetaBinomialFault::ReversedData) => std::mem::swap(&mut k, &mut failures),
            Some(BetaBinomialFault::FoldedCount) => {
                k = k.min(n - k);
                failures = n - k;
            }
            Some(BetaBinomialFault::SquaredCount) => {
                k = k * k / n;
                failures = n - k;
            }
            Some(BetaBinomialFault::PowerPrior { factor }) => weight = factor,
            _ => {}
        }
        let a = c.alpha + weight * k;
        let b = c.beta + weight * failures;
        match c.fault {
            Some(BetaBinomialFault::OmitNormalisation) => ln_beta(a + 1.0, b).exp(),
            Some(BetaBinomialFault::ModeInsteadOfMean) => (a - 1.0) / (a + b - 2.0),
            Some(BetaBinomialFault::Overshoot { coef }) => {
                let m = (ln_beta(a + 1.0, b) - ln_beta(a, b)).exp();
                m + coef * (m - k / n)
            }
            _ => (ln_beta(a + 1.0, b) - ln_beta(a, b)).exp(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn beta_ratio_matches_closed_form() {
        for &(a, b, n, k) in &[(2.0, 2.0, 20.0, 7.0), (0.5, 3.0, 10.0, 0.0), (5.0, 1.0, 40.0, 40.0)] {
            let closed = (a + k) / (a + b + n);
            let got = posterior_mean(a, b, n, k);
            assert!((got - closed).abs() < 1e-12, "({a},{b},{n},{k}): {got} vs {closed}");
        }
    }

    #[test]
    fn symmetric_prior_gives_complementary_means() {
        let c = BetaBinomialConfig::default();
        let m = c.fit(0);
        for x in [0.0, 3.5, 12.0] {
            assert!((m.eval(20.0 - x) - (1.0 - m.eval(x))).abs() < 1e-12);
        }
    }
}
