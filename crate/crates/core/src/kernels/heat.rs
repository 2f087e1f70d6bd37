//! A3: the 1-D heat equation `u_t = kappa u_ss` on [0, 1] with Dirichlet
//! boundaries, explicit finite differences (FTCS).
//!
//! Input `x` is the amplitude of the initial profile `x sin(pi s)`; output is
//! `u(1/2, T)`. The sine profile is an exact eigenvector of the discrete
//! operator, so the midpoint decays geometrically step by step.

use super::{Domain, Model};
use crate::numeric::resample;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub(super) const DOMAIN: Domain = Domain::new(0.5, 2.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum HeatFault {
    /// Reaction term `coef * u^2` added to the update.
    QuadraticSource { coef: f64 },
    /// Left boundary becomes `u_0 = weight * u_1` instead of zero.
    LeakyBoundary { weight: f64 },
    /// Initial profile gets a constant offset.
    InitialOffset { offset: f64 },
    /// Amplitude folds back above `at`: `a = at - |x - at|`.
    FoldedAmplitude { at: f64 },
    /// Amplitude `x - coef * (x - 0.5)^2`.
    QuadraticAmplitude { coef: f64 },
    /// Output is `u - coef * u^2` (saturating read-out).
    SaturatingReadout { coef: f64 },
    /// Amplitude decreases past a threshold: comparison flipped in a branch.
    BranchFlip { above: f64 },
    /// One-sided (first-order) second-difference stencil.
    OneSidedStencil,
    /// Time steps do not refine with the grid.
    FixedTimeSteps,
    /// Time steps double (not quadruple) per level.
    LinearTimeRefinement,
    /// Read the node one to the right of the midpoint.
    OffsetProbe,
    /// Every `every`-th step uses a negative time increment.
    NegativeStep { every: usize },
    /// Skip every `every`-th update.
    SkippedUpdates { every: usize },
    /// Add `size * x` to the midpoint once at fraction `at` of the horizon.
    Kick { at: f64, size: f64 },
    /// Round the state to single precision each step.
    SinglePrecision,
    /// Report the average of the two nodes around the midpoint.
    AveragedProbe,
    /// Integrate one extra time step.
    ExtraStep,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatConfig {
    pub kappa: f64,
    pub horizon: f64,
    pub base_cells: usize,
    pub base_steps: usize,
    pub fault: Option<HeatFault>,
}

impl Default for HeatConfig {
    fn default() -> Self {
        HeatConfig { kappa: 1.0, horizon: 0.1, base_cells: 16, base_steps: 64, fault: None }
    }
}

pub struct Heat<'a> {
    cfg: &'a HeatConfig,
    cells: usize,
    steps: usize,
}

impl HeatConfig {
    pub fn fit(&self, level: u32) -> Heat<'_> {
        let cells = self.base_cells << level;
        let steps = match self.fault {
            Some(HeatFault::FixedTimeSteps) => self.base_steps,
            Some(HeatFault::LinearTimeRefinement) => self.base_steps << level,
            _ => self.base_steps << (2 * level),
        };
        Heat { cfg: self, cells, steps }
    }
}

impl Heat<'_> {
    fn amplitude(&self, x: f64) -> f64 {
        match self.cfg.fault {
            Some(HeatFault::FoldedAmplitude { at }) => at - (x - at).abs(),
            Some(HeatFault::QuadraticAmplitude { coef }) => x - coef * (x - 0.5) * (x - 0.5),
            Some(HeatFault::BranchFlip { above }) if x > above => 2.0 * above - x,
            _ => x,
        }
    }

    fn probe(&self, u: &[f64]) -> f64 {
        let mid = self.cells / 2;
        match self.cfg.fault {
            Some(HeatFault::OffsetProbe) => u[mid + 1],
            Some(HeatFault::AveragedProbe) => 0.5 * (u[mid] + u[mid + 1]),
            Some(HeatFault::SaturatingReadout { coef }) => u[mid] - coef * u[mid] * u[mid],
            _ => u[mid],
        }
    }

    /// Midpoint value after every time step, including t = 0.
    fn solve(&self, x: f64) -> Vec<f64> {
        let c = self.cfg;
        let n = self.cells;
        let dx = 1.0 / n as f64;
        let dt = c.horizon / self.steps as f64;
        let r = c.kappa * dt / (dx * dx);
        let a = self.amplitude(x);
        let offset = match c.fault {
            Some(HeatFault::InitialOffset { offset }) => offset,
            _ => 0.0,
        };
        let mut u: Vec<f64> = (0..=n)
            .map(|i| {
                if i == 0 || i == n {
                    0.0
                } else {
                    a * (PI * i as f64 * dx).sin() + offset
                }
            })
            .collect();
        let mut next = u.clone();
        let total = self.steps + usize::from(matches!(c.fault, Some(HeatFault::ExtraStep)));
        let mut out = Vec::with_capacity(total + 1);
        out.push(self.probe(&u));
        for step in 1..=total {
            let skip = matches!(c.fault, Some(HeatFault::SkippedUpdates { every }) if step % every == 0);
            if !skip {
                let rs = match c.fault {
                    Some(HeatFault::NegativeStep { every }) if step % every == 0 => -r,
                    _ => r,
                };
                for i in 1..n {
                    let lap = match c.fault {
                        Some(HeatFault::OneSidedStencil) if i + 2 <= n => u[i + 2] - 2.0 * u[i + 1] + u[i],
                        _ => u[i + 1] - 2.0 * u[i] + u[i - 1],
                    };
                    let mut v = u[i] + rs * lap;
                    if let Some(HeatFault::QuadraticSource { coef }) = c.fault {
                        v += dt * coef * u[i] * u[i];
                    }
                    next[i] = v;
                }
                next[0] = match c.fault {
                    Some(HeatFault::LeakyBoundary { weight }) => weight * next[1],
                    _ => 0.0,
                };
                next[n] = 0.0;
                std::mem::swap(&mut u, &mut next);
                if let Some(HeatFault::SinglePrecision) = c.fault {
                    u.iter_mut().for_each(|v| *v = *v as f32 as f64);
                }
            }
            if let Some(HeatFault::Kick { at, size }) = c.fault {
                if step == ((at * self.steps as f64).round() as usize).max(1) {
                    u[n / 2] += size * x;
                }
            }
            out.push(self.probe(&u));
        }
        out
    }
}

impl Model for Heat<'_> {
    fn eval(&self, x: f64) -> f64 {
        *self.solve(x).last().unwrap()
    }

    fn trajectory(&self, x: f64, steps: usize) -> Option<Vec<f64>> {
        Some(resample(&self.solve(x), steps))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn midpoint_decays_geometrically() {
        let c = HeatConfig::default();
        let t = c.fit(0).trajectory(1.3, 17).unwrap();
        let r0 = t[1] / t[0];
        for w in t.windows(2) {
            assert!((w[1] / w[0] - r0).abs() < 1e-12);
        }
    }

    #[test]
    fn second_order_in_space_against_the_exact_solution() {
        let c = HeatConfig::default();
        let exact = (-(PI * PI) * 0.1f64).exp();
        let e: Vec<f64> = (0..3).map(|l| (c.fit(l).eval(1.0) - exact).abs()).collect();
        let order = (e[0] / e[2]).log2() / 2.0;
        assert!((order - 2.0).abs() < 0.1, "observed order {order}");
    }
}
