//! C2: polynomial chaos surrogate of `|t|^3` for a uniform germ on [-1, 1].
//!
//! Legendre coefficients `c_n = (2n + 1)/2 * integral g P_n` are computed by
//! Gauss-Legendre quadrature; the surrogate is the truncated series of degree
//! `4 * 2^level`. Even target, so odd coefficients vanish, and the mean of
//! the surrogate is `c_0 = 1/4`.

use super::{Domain, Model};
use crate::numeric::{gauss_legendre, legendre_all, resample};
use serde::{Deserialize, Serialize};

pub(super) const DOMAIN: Domain = Domain::new(-1.0, 1.0);

pub fn pce_target(t: f64) -> f64 {
    t.abs().powi(3)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PceFault {
    /// Projection normalised by `(2n + 1) / denom`.
    WrongNormalisation { denom: f64 },
    /// A spurious first-order coefficient.
    OddLeak { c1: f64 },
    /// Quadrature nodes shifted by `shift`.
    ShiftedNodes { shift: f64 },
    /// The mean term is dropped.
    DropMean,
    /// The two highest retained coefficients trade places.
    SwappedHighOrder,
    /// The second-order coefficient changes sign.
    FlippedQuadratic,
    /// Chebyshev polynomials evaluated with the Legendre coefficients.
    ChebyshevBasis,
    /// Degree ignores the level.
    FixedDegree,
    /// Degree grows by two per level.
    SlowDegree,
    /// Quadrature with only `degree / 2 + 1` nodes.
    UnderResolvedQuadrature,
    /// Output is the mean of all partial sums (Fejér averaging).
    CesaroMean,
    /// Coefficients damped by `exp(-n / (rate * degree))`.
    ExponentialDamping { rate: f64 },
    /// Partial sums accumulated highest degree first, the last term lost.
    ReversedAccumulation,
    /// Above the base degree, coefficients copy `scale * c_{n-4}`.
    StaleHighOrder { scale: f64 },
    /// Beyond level 0, the projection uses target `|t|^3 + eps * t^2`.
    PerturbedFineTarget { eps: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PceConfig {
    pub base_degree: usize,
    pub min_nodes: usize,
    pub fault: Option<PceFault>,
}

impl Default for PceConfig {
    fn default() -> Self {
        PceConfig { base_degree: 4, min_nodes: 64, fault: None }
    }
}

pub struct Pce<'a> {
    cfg: &'a PceConfig,
    coeffs: Vec<f64>,
}

impl PceConfig {
    pub fn fit(&self, level: u32) -> Pce<'_> {
        let degree = match self.fault {
            Some(PceFault::FixedDegree) => self.base_degree,
            Some(PceFault::SlowDegree) => self.base_degree + 2 * level as usize,
            _ => self.base_degree << level,
        };
        let nodes = match self.fault {
            Some(PceFault::UnderResolvedQuadrature) => degree / 2 + 1,
            _ => self.min_nodes.max(2 * degree + 2),
        };
        let (mut ts, ws) = gauss_legendre(nodes);
        if let Some(PceFault::ShiftedNodes { shift }) = self.fault {
            ts.iter_mut().for_each(|t| *t = (*t + shift).min(1.0));
        }
        let target = |t: f64| match self.fault {
            Some(PceFault::PerturbedFineTarget { eps }) if level > 0 => pce_target(t) + eps * t * t,
            _ => pce_target(t),
        };
        let mut coeffs = vec![0.0; degree + 1];
        for (t, w) in ts.iter().zip(&ws) {
            let p = legendre_all(degree, *t);
            let g = target(*t);
            for n in 0..=degree {
                coeffs[n] += w * g * p[n];
            }
        }
        for (n, c) in coeffs.iter_mut().enumerate() {
            let denom = match self.fault {
                Some(PceFault::WrongNormalisation { denom }) => denom,
                _ => 2.0,
            };
            *c *= (2 * n + 1) as f64 / denom;
        }
        match self.fault {
            Some(PceFault::OddLeak { c1 }) => coeffs[1] = c1,
            Some(PceFault::DropMean) => coeffs[0] = 0.0,
            Some(PceFault::SwappedHighOrder) => coeffs.swap(degree, degree - 2),
            Some(PceFault::FlippedQuadratic) => coeffs[2] = -coeffs[2],
            Some(PceFault::ExponentialDamping { rate }) => {
                for (n, c) in coeffs.iter_mut().enumerate() {
                    *c *= (-(n as f64) / (rate * degree as f64)).exp();
                }
            }
            Some(PceFault::StaleHighOrder { scale }) => {
                for n in self.base_degree + 1..=degree {
                    coeffs[n] = scale * coeffs[n - 4];
                }
            }
            _ => {}
        }
        Pce { cfg: self, coeffs }
    }
}

impl Pce<'_> {
    fn basis(&self, x: f64) -> Vec<f64> {
        let degree = self.coeffs.len() - 1;
        if self.cfg.fault == Some(PceFault::ChebyshevBasis) {
            let mut t = vec![1.0, x];
            for n in 2..=degree {
                t.push(2.0 * x * t[n - 1] - t[n - 2]);
            }
            t.truncate(degree + 1);
            t
        } else {
            legendre_all(degree, x)
        }
    }

    fn partial_sums(&self, x: f64) -> Vec<f64> {
        let p = self.basis(x);
        let terms: Vec<f64> = self.coeffs.iter().zip(&p).map(|(c, b)| c * b).collect();
        let mut acc = 0.0;
        if self.cfg.fault == Some(PceFault::ReversedAccumulation) {
            let mut out: Vec<f64> = terms.iter().rev().map(|t| { acc += t; acc }).collect();
            out.pop();
            let last = *out.last().unwrap_or(&0.0);
            out.push(last);
            return out;
        }
        terms.iter().map(|t| { acc += t; acc }).collect()
    }
}

impl Model for Pce<'_> {
    fn eval(&self, x: f64) -> f64 {
        let sums = self.partial_sums(x);
        match self.cfg.fault {
            Some(PceFault::CesaroMean) => sums.iter().sum::<f64>() / sums.len() as f64,
            _ => *sums.last().unwrap(),
        }
    }

    fn trajectory(&self, x: f64, steps: usize) -> Option<Vec<f64>> {
        let mut sums = self.partial_sums(x);
        *sums.last_mut().unwrap() = self.eval(x);
        Some(resample(&sums, steps))
    }
}
