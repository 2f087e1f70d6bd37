//! C1 Gaussian-process regression, D2 squared-hinge SVM and D3 logistic
//! regression. All three fit a fixed, symmetric training design and are
//! deterministic; `level` refines the training grid by `2^level`.

use super::{Domain, Model};
use crate::numeric::{cholesky_solve, phi, resample, sigmoid};
use serde::{Deserialize, Serialize};

pub(super) const GPR_DOMAIN: Domain = Domain::new(-2.0, 2.0);
pub(super) const SVM_DOMAIN: Domain = Domain::new(-3.0, 3.0);
pub(super) const LOGREG_DOMAIN: Domain = Domain::new(-3.0, 3.0);

/// The C1 regression target, odd and increasing on [-2, 2].
pub fn gpr_target(t: f64) -> f64 {
    t + 0.3 * (2.0 * t).sin()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GprKernel {
    /// Matérn-1/2: `exp(-|r| / l)`.
    Exponential,
    /// Squared exponential.
    Gaussian,
    /// `exp(-2 sin^2(pi r / p) / l^2)`.
    Periodic { period: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GprFault {
    /// Covariance loses its diagonal (nugget) term.
    OmitNugget,
    /// The rightmost training point is dropped.
    DropEndpoint,
    /// Training targets are `g(t - shift)`.
    TargetShift { shift: f64 },
    /// Non-zero prior mean that is not subtracted from the targets.
    UncentredPrior { mean: f64 },
    /// Training inputs shifted by `shift`.
    ShiftedDesign { shift: f64 },
    /// Prediction covariance uses the Gaussian kernel while training uses
    /// the configured one.
    MismatchedCrossKernel,
    /// Beyond level 0, the length scale switches to `scale`.
    CoarsePriorAtFine { scale: f64 },
    /// Training grid ignores the level.
    FixedGrid,
    /// One extra training point per level instead of doubling.
    SlowRefinement,
    /// Nugget multiplied by `16^level`.
    GrowingNugget,
    /// Fine levels keep the level-0 weights for the coarse points.
    StaleWeights,
    /// Final prediction conditions on every second training point only.
    HalfConditioning,
    /// Sequential conditioning visits points in reverse and skips the last.
    ReversedConditioning,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GprConfig {
    pub length_scale: f64,
    pub nugget: f64,
    pub base_intervals: usize,
    pub half_width: f64,
    pub kernel: GprKernel,
    pub fault: Option<GprFault>,
}

impl Default for GprConfig {
    fn default() -> Self {
        GprConfig {
            length_scale: 1.0,
            nugget: 1e-5,
            base_intervals: 8,
            half_width: 2.0,
            kernel: GprKernel::Exponential,
            fault: None,
        }
    }
}

pub struct Gpr<'a> {
    cfg: &'a GprConfig,
    level: u32,
    xs: Vec<f64>,
    ys: Vec<f64>,
    weights: Vec<f64>,
    length_scale: f64,
}

impl GprConfig {
    fn covariance(&self, kernel: GprKernel, l: f64, r: f64) -> f64 {
        match kernel {
            GprKernel::Exponential => (-r.abs() / l).exp(),
            GprKernel::Gaussian => (-0.5 * r * r / (l * l)).exp(),
            GprKernel::Periodic { period } => {
                let s = (std::f64::consts::PI * r / period).sin();
                (-2.0 * s * s / (l * l)).exp()
            }
        }
    }

    fn design(&self, level: u32) -> Vec<f64> {
        let intervals = match self.fault {
            Some(GprFault::FixedGrid) => self.base_intervals,
            Some(GprFault::SlowRefinement) => self.base_intervals + level as usize,
            _ => self.base_intervals << level,
        };
        let shift = match self.fault {
            Some(GprFault::ShiftedDesign { shift }) => shift,
            _ => 0.0,
        };
        let w = self.half_width;
        let mut xs: Vec<f64> = Domain::new(-w, w).linspace(intervals + 1).into_iter().map(|t| t + shift).collect();
        if self.fault == Some(GprFault::DropEndpoint) {
            xs.pop();
        }
        xs
    }

    fn target(&self, t: f64) -> f64 {
        match self.fault {
            Some(GprFault::TargetShift { shift }) => gpr_target(t - shift),
            _ => gpr_target(t),
        }
    }

    fn solve(&self, xs: &[f64], ys: &[f64], l: f64, nugget: f64) -> Vec<f64> {
        let n = xs.len();
        let mut k = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                k[i * n + j] = self.covariance(self.kernel, l, xs[i] - xs[j]);
            }
            k[i * n + i] += nugget;
        }
        cholesky_solve(&k, ys, n).unwrap_or_else(|| vec![f64::NAN; n])
    }

    pub fn fit(&self, level: u32) -> Gpr<'_> {
        let xs = self.design(level);
        let ys: Vec<f64> = xs.iter().map(|&t| self.target(t)).collect();
        let length_scale = match self.fault {
            Some(GprFault::CoarsePriorAtFine { scale }) if level > 0 => scale,
            _ => self.length_scale,
        };
        let nugget = match self.fault {
            Some(GprFault::OmitNugget) => 0.0,
            Some(GprFault::GrowingNugget) => self.nugget * 16f64.powi(level as i32),
            _ => self.nugget,
        };
        let mut weights = self.solve(&xs, &ys, length_scale, nugget);
        if self.fault == Some(GprFault::StaleWeights) && level > 0 {
            let coarse = self.design(0);
            let w0 = self.solve(&coarse, &coarse.iter().map(|&t| self.target(t)).collect::<Vec<_>>(), length_scale, nugget);
            let stride = 1 << level;
            for (i, w) in w0.iter().enumerate() {
                weights[i * stride] = 0.5 * (weights[i * stride] + w);
            }
        }
        if self.fault == Some(GprFault::HalfConditioning) {
            let xh: Vec<f64> = xs.iter().step_by(2).copied().collect();
            let yh: Vec<f64> = ys.iter().step_by(2).copied().collect();
            let wh = self.solve(&xh, &yh, length_scale, nugget);
            return Gpr { cfg: self, level, xs: xh, ys: yh, weights: wh, length_scale };
        }
        Gpr { cfg: self, level, xs, ys, weights, length_scale }
    }
}

impl Gpr<'_> {
    fn predict(&self, xs: &[f64], weights: &[f64], x: f64) -> f64 {
        let kernel = match self.cfg.fault {
            Some(GprFault::MismatchedCrossKernel) => GprKernel::Gaussian,
            _ => self.cfg.kernel,
        };
        let mean = match self.cfg.fault {
            Some(GprFault::UncentredPrior { mean }) => mean,
            _ => 0.0,
        };
        mean + xs
            .iter()
            .zip(weights)
            .map(|(&t, w)| w * self.cfg.covariance(kernel, self.length_scale, x - t))
            .sum::<f64>()
    }

    /// Order in which training points are conditioned on: endpoints first,
    /// then successive midpoints (coarse to fine).
    fn conditioning_order(&self) -> Vec<usize> {
        let n = self.xs.len();
        let mut order = vec![0, n - 1];
        let mut seen = vec![false; n];
        seen[0] = true;
        seen[n - 1] = true;
        let mut stride = (n - 1).next_power_of_two();
        while stride > 1 {
            stride /= 2;
            let mut i = stride;
            while i < n {
                if !seen[i] {
                    seen[i] = true;
                    order.push(i);
                }
                i += stride;
            }
        }
        order.extend((0..n).filter(|&i| !seen[i]));
        if self.cfg.fault == Some(GprFault::ReversedConditioning) {
            order.reverse();
        }
        order
    }
}

impl Model for Gpr<'_> {
    fn eval(&self, x: f64) -> f64 {
        self.predict(&self.xs, &self.weights, x)
    }

    fn trajectory(&self, x: f64, steps: usize) -> Option<Vec<f64>> {
        let order = self.conditioning_order();
        let nugget = match self.cfg.fault {
            Some(GprFault::OmitNugget) => 0.0,
            Some(GprFault::GrowingNugget) => self.cfg.nugget * 16f64.powi(self.level as i32),
            _ => self.cfg.nugget,
        };
        let mut traj = Vec::with_capacity(order.len());
        let last_m = if self.cfg.fault == Some(GprFault::ReversedConditioning) { order.len() - 1 } else { order.len() };
        for m in 1..=order.len() {
            let take = m.min(last_m);
            let xs: Vec<f64> = order[..take].iter().map(|&i| self.xs[i]).collect();
            let ys: Vec<f64> = order[..take].iter().map(|&i| self.ys[i]).collect();
            let w = self.cfg.solve(&xs, &ys, self.length_scale, nugget);
            traj.push(self.predict(&xs, &w, x));
        }
        if self.cfg.fault != Some(GprFault::ReversedConditioning) {
            *traj.last_mut().unwrap() = self.eval(x);
        }
        Some(resample(&traj, steps))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LinearLoss {
    SquaredHinge,
    Logistic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum LinearFault {
    /// Decision value sign flips where `|f| < band`.
    SignFlipNearBoundary { band: f64 },
    /// The cubic feature is replaced by an even one (`t^2`).
    EvenFeature,
    /// Positive-class examples weighted by `weight`.
    ClassWeight { weight: f64 },
    /// Training grid shifted by `shift`.
    ShiftedGrid { shift: f64 },
    /// Soft labels flipped for `t` in `[lo, hi]`.
    LabelFlip { lo: f64, hi: f64 },
    /// Newton gradient omits the regulariser's contribution.
    DropRegulariserGradient,
    /// Training grid ignores the level.
    FixedGrid,
    /// Left-endpoint rule instead of midpoints.
    LeftEndpoints,
    /// Newton stops at gradient norm `tol`.
    LooseTolerance { tol: f64 },
    /// At the given level the regulariser is `lambda`.
    LargeRegularisationAt { level: u32, lambda: f64 },
    /// Fine levels train on only the central half of the grid.
    CentralHalfAtFine,
    /// A single damped Newton step from zero.
    OneDampedStep { damping: f64 },
    /// Probabilities clipped to `[clip, 1 - clip]` in the loss.
    ClippedLabels { clip: f64 },
    /// Output is `1 - p` for inputs above `at`.
    ComplementAbove { at: f64 },
    /// Intercept pinned to `bias`.
    PinnedIntercept { bias: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearClassifierConfig {
    pub loss: LinearLoss,
    /// Soft labels are `Phi(label_scale * t)`.
    pub label_scale: f64,
    pub lambda: f64,
    pub base_points: usize,
    pub half_width: f64,
    /// Use the features `(t, t^3 / 3)` instead of `(t)`.
    pub cubic: bool,
    pub max_iter: usize,
    pub fault: Option<LinearFault>,
}

impl LinearClassifierConfig {
    pub fn svm() -> Self {
        LinearClassifierConfig {
            loss: LinearLoss::SquaredHinge,
            label_scale: 0.4,
            lambda: 0.1,
            base_points: 16,
            half_width: 3.0,
            cubic: true,
            max_iter: 60,
            fault: None,
        }
    }

    pub fn logistic() -> Self {
        LinearClassifierConfig {
            loss: LinearLoss::Logistic,
            label_scale: 1.0,
            lambda: 0.01,
            base_points: 16,
            half_width: 3.0,
            cubic: false,
            max_iter: 60,
            fault: None,
        }
    }
}

pub struct LinearModel<'a> {
    cfg: &'a LinearClassifierConfig,
    /// Feature weights followed by the intercept.
    theta: Vec<f64>,
}

impl LinearClassifierConfig {
    fn features(&self, t: f64) -> Vec<f64> {
        let mut f = vec![t];
        if self.cubic {
            f.push(match self.fault {
                Some(LinearFault::EvenFeature) => t * t,
                _ => t * t * t / 3.0,
            });
        }
        f.push(1.0);
        f
    }

    fn design(&self, level: u32) -> (Vec<f64>, Vec<f64>, f64) {
        let n = match self.fault {
            Some(LinearFault::FixedGrid) => self.base_points,
            _ => self.base_points << level,
        };
        let w = self.half_width;
        let h = 2.0 * w / n as f64;
        let shift = match self.fault {
            Some(LinearFault::ShiftedGrid { shift }) => shift,
            _ => 0.0,
        };
        let offset = if self.fault == Some(LinearFault::LeftEndpoints) { 0.0 } else { 0.5 };
        let mut ts: Vec<f64> = (0..n).map(|i| -w + h * (i as f64 + offset) + shift).collect();
        if self.fault == Some(LinearFault::CentralHalfAtFine) && level > 0 {
            ts.retain(|t| t.abs() <= w / 2.0);
        }
        let ps = ts
            .iter()
            .map(|&t| {
                let mut p = phi(self.label_scale * t);
                match self.fault {
                    Some(LinearFault::LabelFlip { lo, hi }) if t >= lo && t <= hi => p = 1.0 - p,
                    Some(LinearFault::ClippedLabels { clip }) => p = p.clamp(clip, 1.0 - clip),
                    _ => {}
                }
                p
            })
            .collect();
        (ts, ps, h)
    }

    pub fn fit(&self, level: u32) -> LinearModel<'_> {
        let (ts, ps, h) = self.design(level);
        let d = self.features(0.0).len();
        let lambda = match self.fault {
            Some(LinearFault::LargeRegularisationAt { level: at, lambda }) if at == level => lambda,
            _ => self.lambda,
        };
        let pos_weight = match self.fault {
            Some(LinearFault::ClassWeight { weight }) => weight,
            _ => 1.0,
        };
        let (iters, damping, tol) = match self.fault {
            Some(LinearFault::OneDampedStep { damping }) => (1, damping, 0.0),
            Some(LinearFault::LooseTolerance { tol }) => (self.max_iter, 1.0, tol),
            _ => (self.max_iter, 1.0, 1e-14),
        };
        let mut theta = vec![0.0; d];
        if let Some(LinearFault::PinnedIntercept { bias }) = self.fault {
            theta[d - 1] = bias;
        }
        for _ in 0..iters {
            let mut g = vec![0.0; d];
            let mut hess = vec![0.0; d * d];
            for (&t, &p) in ts.iter().zip(&ps) {
                let f = self.features(t);
                let z: f64 = f.iter().zip(&theta).map(|(a, b)| a * b).sum();
                // derivative and curvature of the expected loss w.r.t. z
                let (dz, ddz) = match self.loss {
                    LinearLoss::SquaredHinge => {
                        let (mut dz, mut ddz) = (0.0, 0.0);
                        if z < 1.0 {
                            dz += -2.0 * pos_weight * p * (1.0 - z);
                            ddz += 2.0 * pos_weight * p;
                        }
                        if z > -1.0 {
                            dz += 2.0 * (1.0 - p) * (1.0 + z);
                            ddz += 2.0 * (1.0 - p);
                        }
                        (dz, ddz)
                    }
                    LinearLoss::Logistic => {
                        let s = sigmoid(z);
                        let wp = pos_weight * p;
                        (s * (wp + 1.0 - p) - wp, s * (1.0 - s) * (wp + 1.0 - p))
                    }
                };
                for i in 0..d {
                    g[i] += h * dz * f[i];
                    for j in 0..d {
                        hess[i * d + j] += h * ddz * f[i] * f[j];
                    }
                }
            }
            for i in 0..d - 1 {
                if self.fault != Some(LinearFault::DropRegulariserGradient) {
                    g[i] += lambda * theta[i];
                }
                hess[i * d + i] += lambda;
            }
            if matches!(self.fault, Some(LinearFault::PinnedIntercept { .. })) {
                g[d - 1] = 0.0;
                for j in 0..d {
                    hess[(d - 1) * d + j] = 0.0;
                    hess[j * d + d - 1] = 0.0;
                }
                hess[(d - 1) * d + d - 1] = 1.0;
            }
            let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm < tol {
                break;
            }
            let step = match cholesky_solve(&hess, &g, d) {
                Some(s) => s,
                None => break,
            };
            for i in 0..d {
                theta[i] -= damping * step[i];
            }
        }
        LinearModel { cfg: self, theta }
    }
}

impl Model for LinearModel<'_> {
    fn eval(&self, x: f64) -> f64 {
        let c = self.cfg;
        let z: f64 = c.features(x).iter().zip(&self.theta).map(|(a, b)| a * b).sum();
        match c.loss {
            LinearLoss::SquaredHinge => match c.fault {
                Some(LinearFault::SignFlipNearBoundary { band }) if z.abs() < band => -z,
                _ => z,
            },
            LinearLoss::Logistic => match c.fault {
                Some(LinearFault::ComplementAbove { at }) if x > at => 1.0 - sigmoid(z),
                _ => sigmoid(z),
            },
        }
    }
}
