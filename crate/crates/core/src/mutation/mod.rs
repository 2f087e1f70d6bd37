//! Semantic operator classes, the hand-built mutant pools and the small
//! rule-based syntactic set used by the degeneration check.

mod catalog;
mod syntactic;

pub use syntactic::syntactic_mutants;

use crate::error::Result;
use crate::kernels::{Program, PutId};
use crate::mr::MetaPattern;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::LazyLock;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum OperatorClass {
    /// Conservation-breaking.
    CE,
    /// Order-swapping.
    OS,
    /// Hyperparameter and precision degradation.
    HP,
    /// Trajectory-distorting.
    TF,
    /// Fidelity (partial-order) inconsistency.
    SI,
}

impl OperatorClass {
    pub const ALL: [OperatorClass; 5] =
        [OperatorClass::CE, OperatorClass::OS, OperatorClass::HP, OperatorClass::TF, OperatorClass::SI];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        ["CE", "OS", "HP", "TF", "SI"][self.index()]
    }

    /// The pattern this class is designed to break (`align(j) = j`).
    pub fn aligned_mp(self) -> MetaPattern {
        MetaPattern::CAMPAIGN[self.index()]
    }

    pub fn failure_semantics(self) -> &'static str {
        match self {
            OperatorClass::CE => "breaks a conserved quantity or exact identity",
            OperatorClass::OS => "swaps the order of outputs over ordered inputs",
            OperatorClass::HP => "degrades a resolution, precision or rate hyperparameter",
            OperatorClass::TF => "distorts the time or iteration trajectory",
            OperatorClass::SI => "makes a higher-fidelity setting no better than a lower one",
        }
    }

    /// The semanticity conditions every semantic mutant of this class meets.
    pub fn semanticity(self) -> SemanticityFlags {
        let (a, b, c) = match self {
            OperatorClass::CE => (false, true, false),
            OperatorClass::OS => (true, true, false),
            OperatorClass::HP => (false, true, false),
            OperatorClass::TF | OperatorClass::SI => (false, true, true),
        };
        SemanticityFlags { crosses_boundary_a: a, domain_knowledge_b: b, changes_class_c: c }
    }

    pub fn parse(s: &str) -> Option<OperatorClass> {
        OperatorClass::ALL.into_iter().find(|o| o.as_str().eq_ignore_ascii_case(s.trim()))
    }
}

impl fmt::Display for OperatorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SemanticityFlags {
    pub crosses_boundary_a: bool,
    pub domain_knowledge_b: bool,
    pub changes_class_c: bool,
}

impl SemanticityFlags {
    pub fn any(&self) -> bool {
        self.crosses_boundary_a || self.domain_knowledge_b || self.changes_class_c
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MutantKind {
    Semantic,
    Syntactic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MutantRecord {
    pub mutant_id: String,
    pub put: PutId,
    pub operator: OperatorClass,
    pub kind: MutantKind,
    pub semanticity: SemanticityFlags,
    /// Authored marker for deliberately over-injected fixtures.
    pub artefact_flag: bool,
    pub description: String,
    pub evaluator: Program,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Prescreen {
    Accept,
    Reject(String),
}

/// Sixteen evenly spaced interior points plus both endpoints.
pub fn default_probes(put: PutId) -> Vec<f64> {
    put.descriptor().input_domain.linspace(18)
}

/// Fidelity levels the prescreen compares at; faults that only bite under
/// refinement must still count as non-trivial.
pub const PRESCREEN_LEVELS: [u32; 3] = [0, 1, 2];

/// Executability and non-triviality gate applied before pool entry.
pub fn l0_prescreen(m: &MutantRecord, probes: &[f64]) -> Prescreen {
    let original = Program::original(m.put);
    let mut differs = false;
    for level in PRESCREEN_LEVELS {
        let reference = original.fit(0, level);
        let mutant = m.evaluator.fit(0, level);
        for &x in probes {
            let y = mutant.eval(x);
            if !y.is_finite() {
                return Prescreen::Reject(format!("non-finite at x={x}, level {level}"));
            }
            if (y - reference.eval(x)).abs() > 1e-6 {
                differs = true;
            }
        }
    }
    if differs {
        Prescreen::Accept
    } else {
        Prescreen::Reject("trivial: identical to the original at every probe".into())
    }
}

static POOLS: LazyLock<Vec<Vec<MutantRecord>>> = LazyLock::new(|| {
    PutId::ALL
        .iter()
        .map(|&put| {
            let probes = default_probes(put);
            catalog::authored(put).into_iter().filter(|m| l0_prescreen(m, &probes) == Prescreen::Accept).collect()
        })
        .collect()
});

/// The prescreened mutants of one operator class on one PUT.
pub fn catalog(put: PutId, operator: OperatorClass) -> Vec<MutantRecord> {
    POOLS[put.index()].iter().filter(|m| m.operator == operator).cloned().collect()
}

/// The whole prescreened pool of a PUT, in operator order.
pub fn pool(put: PutId) -> Vec<MutantRecord> {
    POOLS[put.index()].clone()
}

/// Looks a PUT up by name, for callers holding strings.
pub fn pool_by_name(put: &str) -> Result<Vec<MutantRecord>> {
    Ok(pool(PutId::parse(put)?))
}

/// Authored mutants before prescreening (for diagnostics and tests).
pub fn authored(put: PutId) -> Vec<MutantRecord> {
    catalog::authored(put)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alignment_is_diagonal() {
        for (k, op) in OperatorClass::ALL.iter().enumerate() {
            assert_eq!(op.aligned_mp(), MetaPattern::CAMPAIGN[k]);
        }
    }

    #[test]
    fn flags_follow_class_pattern() {
        let os = OperatorClass::OS.semanticity();
        assert!(os.crosses_boundary_a && os.domain_knowledge_b);
        let tf = OperatorClass::TF.semanticity();
        assert!(tf.domain_knowledge_b && tf.changes_class_c);
        assert!(OperatorClass::ALL.iter().all(|o| o.semanticity().any()));
    }

    #[test]
    fn prescreen_gates() {
        let probes = default_probes(PutId::A2);
        let mut m = authored(PutId::A2).remove(0);
        m.evaluator = Program::original(PutId::A2);
        assert!(matches!(l0_prescreen(&m, &probes), Prescreen::Reject(r) if r.starts_with("trivial")));
        m.evaluator = Program::Lu(crate::kernels::LuConfig { c: f64::NAN, ..Default::default() });
        assert!(matches!(l0_prescreen(&m, &probes), Prescreen::Reject(r) if r.starts_with("non-finite")));
    }

    #[test]
    fn unknown_put_is_an_error() {
        assert!(matches!(pool_by_name("Z9"), Err(crate::HarnessError::UnknownPut(_))));
    }
}
