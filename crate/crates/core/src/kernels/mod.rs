//! The twelve programs under test.
//!
//! Every kernel maps one real input to one real output and is a pure function
//! of `(config, x, seed)`. A [`Program`] is either the original kernel or a
//! mutant of it: mutants are the same kernel with a different configuration,
//! so original and mutant share all evaluation plumbing.
//!
//! `level` is a fidelity knob (finer grid, longer chain, larger ensemble...)
//! used by convergence and partial-order relations. Level 0 is the default
//! resolution that `evaluate_put` reports.

mod bayes;
mod heat;
mod learn;
mod lorenz;
mod lu;
mod mcmc;
mod montecarlo;
mod pce;
mod regress;

pub use bayes::{posterior_mean, BetaBinomialConfig, BetaBinomialFault};
pub use heat::{HeatConfig, HeatFault};
pub use learn::{MlpConfig, MlpFault, MlpTask};
pub use lorenz::{Integrator, LorenzConfig, LorenzFault};
pub use lu::{lu_decompose, LuConfig, LuFactors, LuFault, PivotRule};
pub use mcmc::{McmcConfig, McmcFault};
pub use montecarlo::{ImportanceConfig, ImportanceFault};
pub use pce::{pce_target, PceConfig, PceFault};
pub use regress::{gpr_target, GprConfig, GprFault, GprKernel, LinearClassifierConfig, LinearFault, LinearLoss};

use crate::error::{HarnessError, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PutId {
    A1,
    A2,
    A3,
    B1,
    B2,
    B3,
    C1,
    C2,
    C3,
    D1,
    D2,
    D3,
}

impl PutId {
    pub const ALL: [PutId; 12] = [
        PutId::A1,
        PutId::A2,
        PutId::A3,
        PutId::B1,
        PutId::B2,
        PutId::B3,
        PutId::C1,
        PutId::C2,
        PutId::C3,
        PutId::D1,
        PutId::D2,
        PutId::D3,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn class(self) -> PutClass {
        match self {
            PutId::A1 | PutId::A2 | PutId::A3 => PutClass::A,
            PutId::B1 | PutId::B2 | PutId::B3 => PutClass::B,
            PutId::C1 | PutId::C2 | PutId::C3 => PutClass::C,
            PutId::D1 | PutId::D2 | PutId::D3 => PutClass::D,
        }
    }

    pub fn as_str(self) -> &'static str {
        ["A1", "A2", "A3", "B1", "B2", "B3", "C1", "C2", "C3", "D1", "D2", "D3"][self.index()]
    }

    pub fn parse(s: &str) -> Result<PutId> {
        PutId::ALL
            .into_iter()
            .find(|p| p.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| HarnessError::UnknownPut(s.to_string()))
    }

    pub fn descriptor(self) -> PutDescriptor {
        DESCRIPTORS[self.index()].clone()
    }
}

impl fmt::Display for PutId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for PutId {
    type Err = HarnessError;
    fn from_str(s: &str) -> Result<Self> {
        PutId::parse(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PutClass {
    /// Numeric solvers.
    A,
    /// Probabilistic inference.
    B,
    /// Surrogate models.
    C,
    /// Machine-learning models.
    D,
}

impl PutClass {
    pub const ALL: [PutClass; 4] = [PutClass::A, PutClass::B, PutClass::C, PutClass::D];

    pub fn members(self) -> [PutId; 3] {
        let base = self as usize * 3;
        [PutId::ALL[base], PutId::ALL[base + 1], PutId::ALL[base + 2]]
    }
}

/// A closed real interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub lo: f64,
    pub hi: f64,
}

impl Domain {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Domain { lo, hi }
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    /// `count` evenly spaced points including both endpoints.
    pub fn linspace(&self, count: usize) -> Vec<f64> {
        if count == 1 {
            return vec![self.midpoint()];
        }
        (0..count)
            .map(|i| {
                if i == count - 1 {
                    self.hi
                } else {
                    self.lo + self.width() * i as f64 / (count - 1) as f64
                }
            })
            .collect()
    }

    /// Whether `x` lies in the outer `band` fraction at either end.
    pub fn in_ood_band(&self, x: f64, band: f64) -> bool {
        let margin = band * self.width();
        x < self.lo + margin || x > self.hi - margin
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PutDescriptor {
    pub id: PutId,
    pub name: String,
    pub mathematical_structure: String,
    pub input_domain: Domain,
    pub ood_band_default: f64,
    pub trajectory_capable: bool,
    /// Whether the output depends on the seed.
    pub stochastic: bool,
}

fn desc(
    id: PutId,
    name: &str,
    structure: &str,
    domain: Domain,
    trajectory_capable: bool,
    stochastic: bool,
) -> PutDescriptor {
    PutDescriptor {
        id,
        name: name.into(),
        mathematical_structure: structure.into(),
        input_domain: domain,
        ood_band_default: 0.02,
        trajectory_capable,
        stochastic,
    }
}

static DESCRIPTORS: std::sync::LazyLock<Vec<PutDescriptor>> = std::sync::LazyLock::new(|| {
    use PutId::*;
    vec![
        desc(A1, "Lorenz RK4", "ODE system, classical Runge-Kutta", lorenz::DOMAIN, true, false),
        desc(A2, "LU determinant", "LU decomposition with partial pivoting", lu::DOMAIN, true, false),
        desc(A3, "Heat equation FDM", "explicit finite differences, parabolic PDE", heat::DOMAIN, true, false),
        desc(B1, "Beta-Binomial posterior", "conjugate Bayesian update", bayes::DOMAIN, false, false),
        desc(B2, "Metropolis-Hastings", "random-walk MCMC", mcmc::DOMAIN, true, true),
        desc(B3, "Importance-sampling MC", "Monte Carlo integration", montecarlo::DOMAIN, true, true),
        desc(C1, "GP regression", "Gaussian-process posterior mean", regress::GPR_DOMAIN, true, false),
        desc(C2, "Polynomial chaos", "Legendre spectral projection", pce::DOMAIN, true, false),
        desc(C3, "NN surrogate", "tanh MLP ensemble regressor", learn::SURROGATE_DOMAIN, true, true),
        desc(D1, "MLP classifier", "tanh MLP ensemble, logistic output", learn::CLASSIFIER_DOMAIN, true, true),
        desc(D2, "SVM", "squared-hinge support vector machine", regress::SVM_DOMAIN, false, false),
        desc(D3, "Logistic regression", "Newton-fitted GLM", regress::LOGREG_DOMAIN, false, false),
    ]
});

pub fn list_puts() -> Vec<PutDescriptor> {
    DESCRIPTORS.clone()
}

/// A fitted program: the object MRs query.
pub trait Model {
    fn eval(&self, x: f64) -> f64;

    /// The observable over time (or iterations), sampled at `steps` points.
    /// `None` when the kernel has no trajectory.
    fn trajectory(&self, _x: f64, _steps: usize) -> Option<Vec<f64>> {
        None
    }
}

/// An executable variant of a PUT (the original or a mutant).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kernel", content = "config")]
pub enum Program {
    Lorenz(LorenzConfig),
    Lu(LuConfig),
    Heat(HeatConfig),
    BetaBinomial(BetaBinomialConfig),
    Mcmc(McmcConfig),
    Importance(ImportanceConfig),
    Gpr(GprConfig),
    Pce(PceConfig),
    Surrogate(MlpConfig),
    Classifier(MlpConfig),
    Svm(LinearClassifierConfig),
    LogReg(LinearClassifierConfig),
}

impl Program {
    pub fn original(id: PutId) -> Program {
        match id {
            PutId::A1 => Program::Lorenz(LorenzConfig::default()),
            PutId::A2 => Program::Lu(LuConfig::default()),
            PutId::A3 => Program::Heat(HeatConfig::default()),
            PutId::B1 => Program::BetaBinomial(BetaBinomialConfig::default()),
            PutId::B2 => Program::Mcmc(McmcConfig::default()),
            PutId::B3 => Program::Importance(ImportanceConfig::default()),
            PutId::C1 => Program::Gpr(GprConfig::default()),
            PutId::C2 => Program::Pce(PceConfig::default()),
            PutId::C3 => Program::Surrogate(MlpConfig::surrogate()),
            PutId::D1 => Program::Classifier(MlpConfig::classifier()),
            PutId::D2 => Program::Svm(LinearClassifierConfig::svm()),
            PutId::D3 => Program::LogReg(LinearClassifierConfig::logistic()),
        }
    }

    pub fn put(&self) -> PutId {
        match self {
            Program::Lorenz(_) => PutId::A1,
            Program::Lu(_) => PutId::A2,
            Program::Heat(_) => PutId::A3,
            Program::BetaBinomial(_) => PutId::B1,
            Program::Mcmc(_) => PutId::B2,
            Program::Importance(_) => PutId::B3,
            Program::Gpr(_) => PutId::C1,
            Program::Pce(_) => PutId::C2,
            Program::Surrogate(_) => PutId::C3,
            Program::Classifier(_) => PutId::D1,
            Program::Svm(_) => PutId::D2,
            Program::LogReg(_) => PutId::D3,
        }
    }

    pub fn domain(&self) -> Domain {
        DESCRIPTORS[self.put().index()].input_domain
    }

    /// Builds (trains, if the kernel learns) the model for a seed and level.
    pub fn fit(&self, seed: u64, level: u32) -> Box<dyn Model + '_> {
        let put = self.put().index() as u64;
        match self {
            Program::Lorenz(c) => Box::new(c.fit(level)),
            Program::Lu(c) => Box::new(c.fit(level)),
            Program::Heat(c) => Box::new(c.fit(level)),
            Program::BetaBinomial(c) => Box::new(c.fit(level)),
            Program::Mcmc(c) => Box::new(c.fit(seed, put, level)),
            Program::Importance(c) => Box::new(c.fit(seed, put, level)),
            Program::Gpr(c) => Box::new(c.fit(level)),
            Program::Pce(c) => Box::new(c.fit(level)),
            Program::Surrogate(c) | Program::Classifier(c) => Box::new(c.fit(seed, put, level)),
            Program::Svm(c) | Program::LogReg(c) => Box::new(c.fit(level)),
        }
    }

    /// Number of configuration leaves that differ from the original kernel.
    /// Drives the over-injection heuristic of the artefact recheck.
    pub fn changed_parameters(&self) -> usize {
        let a = serde_json::to_value(self).expect("configs serialise");
        let b = serde_json::to_value(Program::original(self.put())).expect("configs serialise");
        count_leaf_diffs(&a, &b)
    }
}

fn count_leaf_diffs(a: &serde_json::Value, b: &serde_json::Value) -> usize {
    use serde_json::Value;
    match (a, b) {
        (Value::Object(x), Value::Object(y)) => {
            let mut keys: Vec<&String> = x.keys().chain(y.keys()).collect();
            keys.sort();
            keys.dedup();
            keys.into_iter()
                .map(|k| match (x.get(k), y.get(k)) {
                    (Some(u), Some(v)) => count_leaf_diffs(u, v),
                    (Some(u), None) | (None, Some(u)) => leaf_count(u),
                    (None, None) => 0,
                })
                .sum()
        }
        (Value::Array(x), Value::Array(y)) if x.len() == y.len() => {
            x.iter().zip(y).map(|(u, v)| count_leaf_diffs(u, v)).sum()
        }
        _ if a == b => 0,
        // a changed enum variant or scalar counts once
        _ => 1,
    }
}

fn leaf_count(v: &serde_json::Value) -> usize {
    match v {
        serde_json::Value::Object(m) => m.values().map(leaf_count).sum::<usize>().max(1),
        serde_json::Value::Array(a) => a.iter().map(leaf_count).sum::<usize>().max(1),
        _ => 1,
    }
}

fn check_domain(id: PutId, x: f64) -> Result<()> {
    let d = DESCRIPTORS[id.index()].input_domain;
    if d.contains(x) {
        Ok(())
    } else {
        Err(HarnessError::DomainViolation { x, lo: d.lo, hi: d.hi })
    }
}

/// The unmutated PUT at level 0.
pub fn evaluate_put(id: PutId, x: f64, seed: u64) -> Result<f64> {
    check_domain(id, x)?;
    let program = Program::original(id);
    let y = program.fit(seed, 0).eval(x);
    if y.is_finite() {
        Ok(y)
    } else {
        Err(HarnessError::NonFiniteOutput)
    }
}

/// The unmutated PUT's observable over time; the last element equals
/// [`evaluate_put`] at the same `(x, seed)`.
pub fn evaluate_trajectory(id: PutId, x: f64, seed: u64, steps: usize) -> Result<Vec<f64>> {
    if !DESCRIPTORS[id.index()].trajectory_capable {
        return Err(HarnessError::NotTrajectoryCapable(id.to_string()));
    }
    if steps < 2 {
        return Err(HarnessError::TooFewSteps);
    }
    check_domain(id, x)?;
    let program = Program::original(id);
    let traj = program
        .fit(seed, 0)
        .trajectory(x, steps)
        .ok_or_else(|| HarnessError::NotTrajectoryCapable(id.to_string()))?;
    if traj.iter().all(|v| v.is_finite()) {
        Ok(traj)
    } else {
        Err(HarnessError::NonFiniteOutput)
    }
}
