//! C3 (regression surrogate) and D1 (classifier): ensembles of one-hidden-
//! layer tanh networks without biases, trained by full-batch gradient
//! descent.
//!
//! Without biases every network is an odd function of its input, so the
//! regressor satisfies `f(-x) = -f(x)` and the classifier
//! `p(-x) = 1 - p(x)` regardless of the learned weights. Level `L` averages
//! `4^L` independently initialised members; member `m` always draws the same
//! initial weights, so ensembles are nested across levels.

use super::{Domain, Model};
use crate::numeric::{phi, resample, sigmoid};
use crate::rng::stream;
use rand_distr::StandardNormal;
use rand::Rng;
use serde::{Deserialize, Serialize};

pub(super) const SURROGATE_DOMAIN: Domain = Domain::new(-1.5, 1.5);
pub(super) const CLASSIFIER_DOMAIN: Domain = Domain::new(-3.0, 3.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MlpTask {
    /// Fit `sin(t)` by mean squared error.
    Regression,
    /// Fit soft labels `Phi(t)` by cross-entropy.
    Classification,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum MlpFault {
    /// Hidden units get a fixed bias.
    HiddenBias { bias: f64 },
    /// Activation `tanh(a) + coef * tanh(a)^2`.
    EvenActivation { coef: f64 },
    /// Constant added to the network output before the link.
    OutputOffset { offset: f64 },
    /// Backpropagation omits the output-weight gradient.
    DropOutputGradient,
    /// Backpropagation omits the hidden-weight gradient.
    DropHiddenGradient,
    /// `sin` activation instead of `tanh`.
    SineActivation,
    /// Regression target `sin(freq * t)`.
    TargetFrequency { freq: f64 },
    /// Output reflected for inputs above `at`.
    ReflectAbove { at: f64 },
    /// Training stops after `epochs` epochs.
    EpochTruncation { epochs: usize },
    /// Every member draws the same initial weights.
    SharedInitialisation,
    /// Ensemble doubles (not quadruples) per level.
    DoublingEnsemble,
    /// Training target drifts: `g(t - rate * epoch)`.
    PhaseShift { rate: f64 },
    /// Learning rate multiplied by `1 + amp * sin(2 pi epoch / period)`.
    OscillatingRate { period: usize, amp: f64 },
    /// Hidden unit 0 switched off on alternating blocks of `period` epochs.
    PeriodicMask { period: usize },
    /// Heavy-ball momentum.
    Momentum { beta: f64 },
    /// Fine ensembles report only their first member.
    FirstMemberAtFine,
    /// Members beyond the first are trained for `epochs` epochs only.
    UndertrainedExtras { epochs: usize },
    /// Labels smoothed towards `target`.
    SmoothedLabels { eps: f64, target: f64 },
    /// Output squashed by `1 - coef * (x/w)^2` (input-dependent gain).
    InputGain { coef: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpConfig {
    pub task: MlpTask,
    pub hidden: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub train_points: usize,
    pub half_width: f64,
    pub init_scale: f64,
    pub fault: Option<MlpFault>,
}

impl MlpConfig {
    pub fn surrogate() -> Self {
        MlpConfig {
            task: MlpTask::Regression,
            hidden: 6,
            epochs: 200,
            learning_rate: 0.2,
            train_points: 12,
            half_width: 1.5,
            init_scale: 0.8,
            fault: None,
        }
    }

    pub fn classifier() -> Self {
        MlpConfig {
            task: MlpTask::Classification,
            hidden: 6,
            epochs: 200,
            learning_rate: 0.5,
            train_points: 16,
            half_width: 3.0,
            init_scale: 0.8,
            fault: None,
        }
    }
}

/// One trained network: input weights `w` and output weights `v`.
#[derive(Debug, Clone)]
struct Net {
    w: Vec<f64>,
    v: Vec<f64>,
}

pub struct Ensemble<'a> {
    cfg: &'a MlpConfig,
    members: Vec<Net>,
    /// Per-epoch weights of every member, kept for small ensembles only.
    history: Option<Vec<Vec<Net>>>,
}

impl MlpConfig {
    /// Activation value and slope at pre-activation `a`.
    fn activation_pair(&self, a: f64) -> (f64, f64) {
        let bias = match self.fault {
            Some(MlpFault::HiddenBias { bias }) => bias,
            _ => 0.0,
        };
        let z = a + bias;
        match self.fault {
            Some(MlpFault::SineActivation) => z.sin_cos(),
            Some(MlpFault::EvenActivation { coef }) => {
                let t = z.tanh();
                (t + coef * t * t, (1.0 - t * t) * (1.0 + 2.0 * coef * t))
            }
            _ => {
                let t = z.tanh();
                (t, 1.0 - t * t)
            }
        }
    }

    fn activation(&self, a: f64) -> f64 {
        self.activation_pair(a).0
    }

    fn output_offset(&self) -> f64 {
        match self.fault {
            Some(MlpFault::OutputOffset { offset }) => offset,
            _ => 0.0,
        }
    }

    fn raw(&self, net: &Net, x: f64, mask: Option<usize>) -> f64 {
        self.output_offset()
            + net
                .w
                .iter()
                .zip(&net.v)
                .enumerate()
                .filter(|(j, _)| Some(*j) != mask)
                .map(|(_, (w, v))| v * self.activation(w * x))
                .sum::<f64>()
    }

    fn label(&self, t: f64, epoch: usize) -> f64 {
        let shift = match self.fault {
            Some(MlpFault::PhaseShift { rate }) => rate * epoch as f64,
            _ => 0.0,
        };
        let s = t - shift;
        let y = match self.task {
            MlpTask::Regression => match self.fault {
                Some(MlpFault::TargetFrequency { freq }) => (freq * s).sin(),
                _ => s.sin(),
            },
            MlpTask::Classification => phi(s),
        };
        match self.fault {
            Some(MlpFault::SmoothedLabels { eps, target }) => (1.0 - eps) * y + eps * target,
            _ => y,
        }
    }

    fn mask_at(&self, epoch: usize) -> Option<usize> {
        match self.fault {
            Some(MlpFault::PeriodicMask { period }) if (epoch / period) % 2 == 1 => Some(0),
            _ => None,
        }
    }

    fn train(&self, seed: u64, put: u64, member: usize, keep_history: bool) -> (Net, Vec<Net>) {
        let init_member = if self.fault == Some(MlpFault::SharedInitialisation) { 0 } else { member };
        let mut rng = stream(seed, &[put, 100 + init_member as u64]);
        let mut draw = || self.init_scale * rng.sample::<f64, _>(StandardNormal);
        let mut net = Net {
            w: (0..self.hidden).map(|_| draw()).collect(),
            v: (0..self.hidden).map(|_| draw()).collect(),
        };
        let epochs = match self.fault {
            Some(MlpFault::EpochTruncation { epochs }) => epochs,
            Some(MlpFault::UndertrainedExtras { epochs }) if member > 0 => epochs,
            _ => self.epochs,
        };
        let ts = Domain::new(-self.half_width, self.half_width).linspace(self.train_points);
        let n = ts.len() as f64;
        let mut history = Vec::new();
        if keep_history {
            history.push(net.clone());
        }
        let (mut mw, mut mv) = (vec![0.0; self.hidden], vec![0.0; self.hidden]);
        let (mut gw, mut gv) = (vec![0.0; self.hidden], vec![0.0; self.hidden]);
        let mut acts = vec![(0.0, 0.0); self.hidden];
        let drifting = matches!(self.fault, Some(MlpFault::PhaseShift { .. }));
        let mut labels: Vec<f64> = ts.iter().map(|&t| self.label(t, 0)).collect();
        let offset = self.output_offset();
        for epoch in 0..epochs {
            let mask = self.mask_at(epoch);
            gw.iter_mut().chain(gv.iter_mut()).for_each(|g| *g = 0.0);
            if drifting {
                for (y, &t) in labels.iter_mut().zip(&ts) {
                    *y = self.label(t, epoch);
                }
            }
            for (&t, &y) in ts.iter().zip(&labels) {
                let mut z = offset;
                for j in 0..self.hidden {
                    acts[j] = self.activation_pair(net.w[j] * t);
                    if Some(j) != mask {
                        z += net.v[j] * acts[j].0;
                    }
                }
                // dLoss/dz for MSE (regression) and cross-entropy (logistic link)
                let err = match self.task {
                    MlpTask::Regression => 2.0 * (z - y),
                    MlpTask::Classification => sigmoid(z) - y,
                } / n;
                for j in 0..self.hidden {
                    if Some(j) == mask {
                        continue;
                    }
                    gv[j] += err * acts[j].0;
                    gw[j] += err * net.v[j] * acts[j].1 * t;
                }
            }
            let mut lr = self.learning_rate;
            if let Some(MlpFault::OscillatingRate { period, amp }) = self.fault {
                lr *= 1.0 + amp * (2.0 * std::f64::consts::PI * epoch as f64 / period as f64).sin();
            }
            let beta = match self.fault {
                Some(MlpFault::Momentum { beta }) => beta,
                _ => 0.0,
            };
            for j in 0..self.hidden {
                if self.fault != Some(MlpFault::DropHiddenGradient) {
                    mw[j] = beta * mw[j] + gw[j];
                    net.w[j] -= lr * mw[j];
                }
                if self.fault != Some(MlpFault::DropOutputGradient) {
                    mv[j] = beta * mv[j] + gv[j];
                    net.v[j] -= lr * mv[j];
                }
            }
            if keep_history {
                history.push(net.clone());
            }
        }
        (net, history)
    }

    pub fn fit(&self, seed: u64, put: u64, level: u32) -> Ensemble<'_> {
        let size = match self.fault {
            Some(MlpFault::DoublingEnsemble) => 1usize << level,
            _ => 1usize << (2 * level),
        };
        let keep = size <= 4;
        let mut members = Vec::with_capacity(size);
        let mut histories = Vec::with_capacity(size);
        for m in 0..size {
            let (net, hist) = self.train(seed, put, m, keep);
            members.push(net);
            histories.push(hist);
        }
        if self.fault == Some(MlpFault::FirstMemberAtFine) && size > 1 {
            members.truncate(1);
            histories.truncate(1);
        }
        Ensemble { cfg: self, members, history: keep.then_some(histories) }
    }
}

impl Ensemble<'_> {
    fn predict(&self, nets: &[&Net], x: f64, mask: Option<usize>) -> f64 {
        let c = self.cfg;
        let xin = match c.fault {
            Some(MlpFault::ReflectAbove { at }) if x > at => 2.0 * at - x,
            _ => x,
        };
        let mean = nets.iter().map(|n| c.raw(n, xin, mask)).sum::<f64>() / nets.len() as f64;
        let gain = match c.fault {
            Some(MlpFault::InputGain { coef }) => 1.0 - coef * (x / c.half_width).powi(2),
            _ => 1.0,
        };
        match c.task {
            MlpTask::Regression => gain * mean,
            MlpTask::Classification => sigmoid(gain * mean),
        }
    }
}

impl Model for Ensemble<'_> {
    fn eval(&self, x: f64) -> f64 {
        let nets: Vec<&Net> = self.members.iter().collect();
        self.predict(&nets, x, None)
    }

    /// Ensemble prediction at `x` after every training epoch.
    fn trajectory(&self, x: f64, steps: usize) -> Option<Vec<f64>> {
        let history = self.history.as_ref()?;
        let epochs = history.iter().map(Vec::len).max().unwrap_or(1);
        let mut traj: Vec<f64> = (0..epochs)
            .map(|e| {
                let nets: Vec<&Net> = history.iter().map(|h| &h[e.min(h.len() - 1)]).collect();
                self.predict(&nets, x, self.cfg.mask_at(e))
            })
            .collect();
        *traj.last_mut().unwrap() = self.eval(x);
        Some(resample(&traj, steps))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn surrogate_is_odd_and_fits_the_target() {
        let c = MlpConfig::surrogate();
        let m = c.fit(1, 8, 1);
        for x in [0.2, 0.9, 1.4] {
            assert_eq!(m.eval(-x), -m.eval(x));
            assert!((m.eval(x) - x.sin()).abs() < 0.1, "x={x}: {}", m.eval(x));
        }
    }

    #[test]
    fn classifier_is_complementary() {
        let c = MlpConfig::classifier();
        let m = c.fit(2, 9, 0);
        for x in [0.5, 2.0] {
            assert!((m.eval(-x) - (1.0 - m.eval(x))).abs() < 1e-12);
        }
        assert!(m.eval(2.5) > m.eval(0.5));
    }

    #[test]
    fn ensembles_are_nested_across_levels() {
        let c = MlpConfig::surrogate();
        let small = c.fit(4, 8, 0);
        let big = c.fit(4, 8, 1);
        assert_eq!(small.members[0].w, big.members[0].w);
    }
}
