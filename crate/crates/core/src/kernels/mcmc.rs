//! B2: random-walk Metropolis-Hastings.
//!
//! Target `N(x, sigma^2)`, chain started at `x`, Gaussian proposals. Output is
//! the chain mean over `1000 * 4^level` steps. Proposal increments and
//! acceptance uniforms come from the seed alone, so two inputs evaluated
//! with the same seed see identical noise: the chain for `x + c` is the chain
//! for `x` shifted by `c`.

use super::{Domain, Model};
use crate::numeric::resample;
use crate::rng::{stream, Rng};
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

pub(super) const DOMAIN: Domain = Domain::new(-2.0, 2.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum McmcFault {
    /// Acceptance `min(cap, r)` instead of `min(1, r)`.
    AcceptanceCap { cap: f64 },
    /// Between the two chain fractions, draw states independently from
    /// `N(0, scale^2)` instead of walking.
    IndependentSegment { from: f64, to: f64, scale: f64 },
    /// Start the chain at zero rather than at the target centre.
    ColdStart,
    /// The target centre is `x * factor`.
    ScaledCentre { factor: f64 },
    /// Accept with `min(1, r^power)`: a tempered acceptance rule.
    TemperedAcceptance { power: f64 },
    /// Log-density drops its quadratic factor of one half.
    MissingHalf,
    /// Accept when `u > r` (comparison flipped).
    FlippedComparison,
    /// Chain length ignores the level.
    FixedLength,
    /// Chain length doubles (not quadruples) per level.
    DoublingLength,
    /// Every state is followed by `lag` copies of a stale state.
    StaleState { every: usize },
    /// Include the first `burn` states twice in the average.
    DoubleCountedBurnIn { burn: usize },
    /// Symmetric proposals replaced by a drifting proposal `N(drift, s^2)`.
    DriftingProposal { drift: f64 },
    /// Report the median of the chain instead of the mean.
    MedianEstimate,
    /// Output is truncated to `digits` decimals.
    RoundOutput { digits: i32 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McmcConfig {
    pub target_sd: f64,
    pub step: f64,
    pub base_length: usize,
    pub fault: Option<McmcFault>,
}

impl Default for McmcConfig {
    fn default() -> Self {
        McmcConfig { target_sd: 1.0, step: 1.0, base_length: 1000, fault: None }
    }
}

pub struct Mcmc<'a> {
    cfg: &'a McmcConfig,
    increments: Vec<f64>,
    uniforms: Vec<f64>,
    fresh: Vec<f64>,
}

impl McmcConfig {
    pub fn fit(&self, seed: u64, put: u64, level: u32) -> Mcmc<'_> {
        let len = match self.fault {
            Some(McmcFault::FixedLength) => self.base_length,
            Some(McmcFault::DoublingLength) => self.base_length << level,
            _ => self.base_length << (2 * level),
        };
        // one stream per quantity keeps shorter chains prefixes of longer ones
        let mut inc = stream(seed, &[put, 1]);
        let mut uni = stream(seed, &[put, 2]);
        let mut ind = stream(seed, &[put, 3]);
        Mcmc {
            cfg: self,
            increments: (0..len).map(|_| inc.sample::<f64, _>(StandardNormal)).collect(),
            uniforms: (0..len).map(|_| uni.random::<f64>()).collect(),
            fresh: match self.fault {
                Some(McmcFault::IndependentSegment { .. }) => {
                    (0..len).map(|_| ind.sample::<f64, _>(StandardNormal)).collect()
                }
                _ => Vec::new(),
            },
        }
    }
}

impl Mcmc<'_> {
    fn log_target(&self, theta: f64, centre: f64) -> f64 {
        let z = (theta - centre) / self.cfg.target_sd;
        match self.cfg.fault {
            Some(McmcFault::MissingHalf) => -z * z,
            _ => -0.5 * z * z,
        }
    }

    fn chain(&self, x: f64) -> Vec<f64> {
        let c = self.cfg;
        let n = self.increments.len();
        let centre = match c.fault {
            Some(McmcFault::ScaledCentre { factor }) => x * factor,
            _ => x,
        };
        let mut theta = match c.fault {
            Some(McmcFault::ColdStart) => 0.0,
            _ => x,
        };
        let drift = match c.fault {
            Some(McmcFault::DriftingProposal { drift }) => drift,
            _ => 0.0,
        };
        let mut states = Vec::with_capacity(n);
        let segment = |i: usize, from: f64, to: f64| {
            i >= (from * n as f64) as usize && i < (to * n as f64) as usize
        };
        for i in 0..n {
            match c.fault {
                Some(McmcFault::IndependentSegment { from, to, scale }) if segment(i, from, to) => {
                    theta = scale * self.fresh[i];
                }
                Some(McmcFault::StaleState { every }) if i % every == every - 1 => {}
                _ => {
                    let proposal = theta + c.step * self.increments[i] + drift;
                    let log_r = self.log_target(proposal, centre) - self.log_target(theta, centre);
                    let u = self.uniforms[i];
                    let accept = match c.fault {
                        Some(McmcFault::AcceptanceCap { cap }) => u < log_r.exp().min(cap),
                        Some(McmcFault::TemperedAcceptance { power }) => u < (power * log_r).exp().min(1.0),
                        Some(McmcFault::FlippedComparison) => u > log_r.exp().min(1.0),
                        _ => u.ln() < log_r,
                    };
                    if accept {
                        theta = proposal;
                    }
                }
            }
            states.push(theta);
        }
        states
    }

    fn running_mean(&self, states: &[f64]) -> Vec<f64> {
        let burn = match self.cfg.fault {
            Some(McmcFault::DoubleCountedBurnIn { burn }) => burn,
            _ => 0,
        };
        let mut sum = 0.0;
        let mut count = 0.0;
        states
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let w = if i < burn { 2.0 } else { 1.0 };
                sum += w * s;
                count += w;
                sum / count
            })
            .collect()
    }

    fn reduce(&self, states: &[f64], running: &[f64]) -> f64 {
        match self.cfg.fault {
            Some(McmcFault::MedianEstimate) => {
                let mut s = states.to_vec();
                s.sort_by(f64::total_cmp);
                let m = s.len();
                0.5 * (s[(m - 1) / 2] + s[m / 2])
            }
            Some(McmcFault::RoundOutput { digits }) => {
                let p = 10f64.powi(digits);
                (running[running.len() - 1] * p).trunc() / p
            }
            _ => running[running.len() - 1],
        }
    }
}

impl Model for Mcmc<'_> {
    fn eval(&self, x: f64) -> f64 {
        let states = self.chain(x);
        let running = self.running_mean(&states);
        self.reduce(&states, &running)
    }

    /// Running chain mean, starting from the initial state.
    fn trajectory(&self, x: f64, steps: usize) -> Option<Vec<f64>> {
        let states = self.chain(x);
        let mut running = self.running_mean(&states);
        let last = self.reduce(&states, &running);
        *running.last_mut().unwrap() = last;
        let start = match self.cfg.fault {
            Some(McmcFault::ColdStart) => 0.0,
            _ => x,
        };
        running.insert(0, start);
        Some(resample(&running, steps))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_is_translation_equivariant_under_common_noise() {
        let c = McmcConfig::default();
        let m = c.fit(11, 4, 0);
        for x in [-1.5, 0.0, 0.7] {
            assert!((m.eval(x + 0.5) - 0.5 - m.eval(x)).abs() < 1e-9);
        }
    }

    #[test]
    fn chain_mean_estimates_the_target_centre() {
        let c = McmcConfig::default();
        let m = c.fit(3, 4, 2);
        assert!((m.eval(1.0) - 1.0).abs() < 0.1);
    }
}
