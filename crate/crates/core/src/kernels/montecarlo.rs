//! B3: importance-sampling Monte Carlo.
//!
//! Estimates `I(x) = integral_{-1}^{1} exp(x t) dt = 2 sinh(x) / x` with the
//! symmetric proposal `q(t) = (|t| + 1/2) / 2` and antithetic pairs
//! `(t, -t)`. With antithetic pairs the estimator is exactly even in `x`.
//! `1000 * 4^level` samples; the trajectory is the running estimate.

use super::{Domain, Model};
use crate::numeric::resample;
use crate::rng::{stream, Rng};
use serde::{Deserialize, Serialize};

pub(super) const DOMAIN: Domain = Domain::new(-2.0, 2.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ImportanceFault {
    /// Importance weights use a proposal density normalised by `norm`.
    WrongNormaliser { norm: f64 },
    /// Drop the antithetic partner of every pair.
    NoAntithetic,
    /// Proposal magnitude drawn uniformly but weighted as if from `q`.
    UniformDraws,
    /// Weight `exp(x t) / q(t)` replaced by `exp(x |t|) / q(t)`.
    AbsoluteExponent,
    /// Self-normalised estimator `2 * sum(w f) / sum(w')`.
    SelfNormalised,
    /// Sample count ignores the level.
    FixedSamples,
    /// Samples are recycled: only the first `base` pairs are distinct.
    RecycledSamples,
    /// Only half the drawn pairs enter the sum but the divisor is unchanged.
    HalfSum,
    /// Control variate with a wrong coefficient: subtract `coef * (t - 0)`.
    BiasedControlVariate { coef: f64 },
    /// The running estimate restarts at the halfway point.
    RestartHalfway,
    /// Cumulative sum divides by the total count at every step.
    PrematureDivision,
    /// Inverse-CDF transform uses a wrong constant.
    SkewedInverse { a: f64 },
    /// Estimator multiplied by `(1 + eps)`.
    ScaledEstimate { eps: f64 },
    /// Every pair counted with the antithetic member's own density.
    OddPairing,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportanceConfig {
    pub base_pairs: usize,
    /// Proposal is `(|t| + offset) / (2 * (1/2 + offset))`.
    pub offset: f64,
    pub fault: Option<ImportanceFault>,
}

impl Default for ImportanceConfig {
    fn default() -> Self {
        ImportanceConfig { base_pairs: 500, offset: 0.5, fault: None }
    }
}

pub struct Importance<'a> {
    cfg: &'a ImportanceConfig,
    draws: Vec<f64>,
}

impl ImportanceConfig {
    pub fn fit(&self, seed: u64, put: u64, level: u32) -> Importance<'_> {
        let pairs = match self.fault {
            Some(ImportanceFault::FixedSamples) => self.base_pairs,
            _ => self.base_pairs << (2 * level),
        };
        let mut rng = stream(seed, &[put, 1]);
        let mut draws: Vec<f64> = (0..pairs).map(|_| rng.random::<f64>()).collect();
        if self.fault == Some(ImportanceFault::RecycledSamples) {
            for i in self.base_pairs..pairs {
                draws[i] = draws[i % self.base_pairs];
            }
        }
        Importance { cfg: self, draws }
    }
}

impl Importance<'_> {
    fn density(&self, t: f64) -> f64 {
        let o = self.cfg.offset;
        let norm = match self.cfg.fault {
            Some(ImportanceFault::WrongNormaliser { norm }) => norm,
            _ => 2.0 * (0.5 + o),
        };
        (t.abs() + o) / norm
    }

    /// Magnitude in [0, 1] with density proportional to `m + offset`.
    fn magnitude(&self, u: f64) -> f64 {
        let o = self.cfg.offset;
        match self.cfg.fault {
            Some(ImportanceFault::UniformDraws) => u,
            Some(ImportanceFault::SkewedInverse { a }) => (-o + (o * o + a * u).sqrt()).min(1.0),
            // F(m) = (m^2/2 + o m) / (1/2 + o)
            _ => -o + (o * o + (1.0 + 2.0 * o) * u).sqrt(),
        }
    }

    /// Per-pair contributions `(w(t) + w(-t))` for pair sums.
    fn running(&self, x: f64) -> Vec<f64> {
        let c = self.cfg;
        let n = self.draws.len();
        let mut sum = 0.0;
        let mut out = Vec::with_capacity(n);
        let mut wsum = 0.0;
        for (i, &u) in self.draws.iter().enumerate() {
            let m = self.magnitude(u);
            let q = self.density(m);
            let (a, b) = match c.fault {
                Some(ImportanceFault::AbsoluteExponent) => ((x * m).exp() / q, (x * m).exp() / q),
                Some(ImportanceFault::NoAntithetic) => {
                    let t = if i % 2 == 0 { m } else { -m };
                    ((x * t).exp() / q, (x * t).exp() / q)
                }
                Some(ImportanceFault::OddPairing) => ((x * m).exp() / q, (-x * m).exp() / self.density(-m * 0.9)),
                Some(ImportanceFault::BiasedControlVariate { coef }) => {
                    ((x * m).exp() / q - coef * m, (-x * m).exp() / q + coef * m * 0.5)
                }
                _ => ((x * m).exp() / q, (-x * m).exp() / q),
            };
            if c.fault == Some(ImportanceFault::RestartHalfway) && i == n / 2 {
                sum = 0.0;
            }
            if !(c.fault == Some(ImportanceFault::HalfSum) && i % 2 == 1) {
                sum += a + b;
            }
            wsum += 2.0 / q;
            let count = match c.fault {
                Some(ImportanceFault::RestartHalfway) if i >= n / 2 => (i - n / 2 + 1) as f64,
                Some(ImportanceFault::PrematureDivision) => n as f64,
                _ => (i + 1) as f64,
            };
            let est = match c.fault {
                Some(ImportanceFault::SelfNormalised) => 2.0 * sum / wsum,
                _ => sum / (2.0 * count),
            };
            out.push(match c.fault {
                Some(ImportanceFault::ScaledEstimate { eps }) => est * (1.0 + eps),
                _ => est,
            });
        }
        out
    }
}

impl Model for Importance<'_> {
    fn eval(&self, x: f64) -> f64 {
        *self.running(x).last().unwrap()
    }

    fn trajectory(&self, x: f64, steps: usize) -> Option<Vec<f64>> {
        Some(resample(&self.running(x), steps))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exact(x: f64) -> f64 {
        if x == 0.0 {
            2.0
        } else {
            2.0 * x.sinh() / x
        }
    }

    #[test]
    fn estimator_is_even_and_accurate() {
        let c = ImportanceConfig::default();
        let m = c.fit(5, 5, 1);
        for x in [0.3, 1.1, 2.0] {
            assert_eq!(m.eval(x), m.eval(-x));
            assert!((m.eval(x) - exact(x)).abs() < 0.05 * exact(x), "x={x}: {}", m.eval(x));
        }
    }

    #[test]
    fn proposal_density_integrates_to_one() {
        let c = ImportanceConfig::default();
        let m = c.fit(0, 0, 0);
        let n = 20000;
        let total: f64 = (0..n)
            .map(|i| {
                let t = -1.0 + 2.0 * (i as f64 + 0.5) / n as f64;
                m.density(t) * 2.0 / n as f64
            })
            .sum();
        assert!((total - 1.0).abs() < 1e-6);
    }
}
