//! A1: the Lorenz system integrated by classical RK4.
//!
//! Input `x` sets the initial state `(x, x, z0)`; output is `z` at the
//! horizon. The Lorenz equations are invariant under `(x, y) -> (-x, -y)`,
//! so `z(T)` is even in the input.

use super::{Domain, Model};
use crate::numeric::resample;
use serde::{Deserialize, Serialize};

pub(super) const DOMAIN: Domain = Domain::new(-10.0, 10.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Integrator {
    Rk4,
    /// Average of the Euler and Heun updates: a 1.5-order hybrid.
    Hybrid,
    Heun,
    Euler,
    /// RK4 with the last stage reusing the second-stage slope.
    StaleStage,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum LorenzFault {
    /// Swap the y and z components once, at the given fraction of the horizon.
    SwapYz { at: f64 },
    /// Add `size` to z once, at the given fraction of the horizon.
    Kick { at: f64, size: f64 },
    /// Multiply z by `factor` every `every` steps.
    Damp { every: usize, factor: f64 },
    /// Hold x constant between the two horizon fractions.
    FreezeX { from: f64, to: f64 },
    /// Replace `x` by `|x|` in the y equation.
    AbsCoupling,
    /// Round the state to single precision after every step.
    SinglePrecision,
    /// Round the reported output to `digits` decimals.
    RoundOutput { digits: i32 },
    /// Ignore the level knob: always use the base step count.
    FixedSteps,
    /// Report z one step before the horizon.
    LaggedOutput,
    /// Add a term `coef * x^2` to dx/dt.
    QuadraticForcing { coef: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LorenzConfig {
    pub sigma: f64,
    pub rho: f64,
    pub beta: f64,
    pub z0: f64,
    /// Initial y is `y_scale * x + y_offset`.
    pub y_scale: f64,
    pub y_offset: f64,
    /// Initial z is `z0 + z_slope * x`.
    pub z_slope: f64,
    pub horizon: f64,
    pub base_steps: usize,
    pub integrator: Integrator,
    /// Constant added to dx/dt (epsilon drift).
    pub drift: f64,
    pub fault: Option<LorenzFault>,
}

impl Default for LorenzConfig {
    fn default() -> Self {
        LorenzConfig {
            sigma: 10.0,
            rho: 28.0,
            beta: 8.0 / 3.0,
            z0: 25.0,
            y_scale: 1.0,
            y_offset: 0.0,
            z_slope: 0.0,
            horizon: 0.5,
            base_steps: 50,
            integrator: Integrator::Rk4,
            drift: 0.0,
            fault: None,
        }
    }
}

pub struct Lorenz<'a> {
    cfg: &'a LorenzConfig,
    steps: usize,
}

impl LorenzConfig {
    pub fn fit(&self, level: u32) -> Lorenz<'_> {
        let steps = match self.fault {
            Some(LorenzFault::FixedSteps) => self.base_steps,
            _ => self.base_steps << level,
        };
        Lorenz { cfg: self, steps }
    }

    fn rhs(&self, s: [f64; 3]) -> [f64; 3] {
        let [x, y, z] = s;
        let coupling = match self.fault {
            Some(LorenzFault::AbsCoupling) => x.abs(),
            _ => x,
        };
        let forcing = match self.fault {
            Some(LorenzFault::QuadraticForcing { coef }) => coef * x * x,
            _ => 0.0,
        };
        [
            self.sigma * (y - x) + self.drift + forcing,
            coupling * (self.rho - z) - y,
            x * y - self.beta * z,
        ]
    }
}

fn axpy(s: [f64; 3], a: f64, k: [f64; 3]) -> [f64; 3] {
    [s[0] + a * k[0], s[1] + a * k[1], s[2] + a * k[2]]
}

impl Lorenz<'_> {
    fn step(&self, s: [f64; 3], h: f64) -> [f64; 3] {
        let c = self.cfg;
        let k1 = c.rhs(s);
        match c.integrator {
            Integrator::Euler => axpy(s, h, k1),
            Integrator::Heun | Integrator::Hybrid => {
                let k2 = c.rhs(axpy(s, h, k1));
                let heun = [
                    s[0] + 0.5 * h * (k1[0] + k2[0]),
                    s[1] + 0.5 * h * (k1[1] + k2[1]),
                    s[2] + 0.5 * h * (k1[2] + k2[2]),
                ];
                if c.integrator == Integrator::Heun {
                    heun
                } else {
                    let euler = axpy(s, h, k1);
                    [
                        0.5 * (heun[0] + euler[0]),
                        0.5 * (heun[1] + euler[1]),
                        0.5 * (heun[2] + euler[2]),
                    ]
                }
            }
            Integrator::Rk4 | Integrator::StaleStage => {
                let k2 = c.rhs(axpy(s, 0.5 * h, k1));
                let k3 = c.rhs(axpy(s, 0.5 * h, k2));
                let k4 = if c.integrator == Integrator::Rk4 {
                    c.rhs(axpy(s, h, k3))
                } else {
                    k2
                };
                let mut out = s;
                for i in 0..3 {
                    out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
                }
                out
            }
        }
    }

    /// z after every step, including the initial state.
    fn integrate(&self, x: f64) -> Vec<f64> {
        let c = self.cfg;
        let n = self.steps;
        let h = c.horizon / n as f64;
        let mut s = [x, c.y_scale * x + c.y_offset, c.z0 + c.z_slope * x];
        let mut zs = Vec::with_capacity(n + 1);
        zs.push(s[2]);
        let at_step = |frac: f64| ((frac * n as f64).round() as usize).clamp(1, n);
        for i in 1..=n {
            let frozen_x = s[0];
            s = self.step(s, h);
            match c.fault {
                Some(LorenzFault::SwapYz { at }) if i == at_step(at) => s.swap(1, 2),
                Some(LorenzFault::Kick { at, size }) if i == at_step(at) => s[2] += size,
                Some(LorenzFault::Damp { every, factor }) if i % every == 0 => s[2] *= factor,
                Some(LorenzFault::FreezeX { from, to }) if i >= at_step(from) && i < at_step(to) => {
                    s[0] = frozen_x
                }
                Some(LorenzFault::SinglePrecision) => s = s.map(|v| v as f32 as f64),
                _ => {}
            }
            zs.push(s[2]);
        }
        zs
    }

    fn observable(&self, zs: &[f64]) -> f64 {
        match self.cfg.fault {
            Some(LorenzFault::LaggedOutput) => zs[zs.len() - 2],
            Some(LorenzFault::RoundOutput { digits }) => {
                let p = 10f64.powi(digits);
                (zs[zs.len() - 1] * p).round() / p
            }
            _ => zs[zs.len() - 1],
        }
    }
}

impl Model for Lorenz<'_> {
    fn eval(&self, x: f64) -> f64 {
        self.observable(&self.integrate(x))
    }

    fn trajectory(&self, x: f64, steps: usize) -> Option<Vec<f64>> {
        let mut zs = self.integrate(x);
        let last = self.observable(&zs);
        *zs.last_mut().unwrap() = last;
        Some(resample(&zs, steps))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn output_is_even_in_the_input() {
        let c = LorenzConfig::default();
        let m = c.fit(0);
        for x in [0.5, 3.0, 9.5] {
            assert_eq!(m.eval(x), m.eval(-x), "z(T) must be even at x={x}");
        }
    }

    #[test]
    fn rk4_converges_with_order_at_least_3_5() {
        let c = LorenzConfig::default();
        let reference = c.fit(6).eval(4.0);
        let e: Vec<f64> = (0..3).map(|l| (c.fit(l).eval(4.0) - reference).abs()).collect();
        let order = ((e[0] / e[1]).log2() + (e[1] / e[2]).log2()) / 2.0;
        assert!(order >= 3.5, "observed order {order}");
    }

    #[test]
    fn euler_is_first_order() {
        let c = LorenzConfig { integrator: Integrator::Euler, ..Default::default() };
        let reference = LorenzConfig::default().fit(6).eval(4.0);
        let e: Vec<f64> = (2..5).map(|l| (c.fit(l).eval(4.0) - reference).abs()).collect();
        let order = (e[0] / e[2]).log2() / 2.0;
        assert!((order - 1.0).abs() < 0.3, "observed order {order}");
    }
}
