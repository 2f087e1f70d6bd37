//! Rule-based syntactic mutants for the deterministic class.
//!
//! Three rules: a numeric constant moved by one, an arithmetic operator
//! swapped, a comparison operator swapped. None of them uses domain
//! knowledge, so every semanticity flag is false.

use super::{MutantKind, MutantRecord, OperatorClass, SemanticityFlags};
use crate::error::{HarnessError, Result};
use crate::kernels::*;

#[derive(Clone, Copy)]
enum Rule {
    ConstantShift,
    ArithmeticSwap,
    ComparisonSwap,
}

impl Rule {
    fn tag(self) -> &'static str {
        match self {
            Rule::ConstantShift => "const",
            Rule::ArithmeticSwap => "arith",
            Rule::ComparisonSwap => "cmp",
        }
    }

    /// Records need an operator label; syntactic rules borrow the nearest one.
    fn operator(self) -> OperatorClass {
        match self {
            Rule::ConstantShift => OperatorClass::HP,
            Rule::ArithmeticSwap => OperatorClass::CE,
            Rule::ComparisonSwap => OperatorClass::OS,
        }
    }
}

fn rules(put: PutId) -> Option<Vec<(Rule, &'static str, Program)>> {
    use Rule::*;
    let lorenz = |f: &dyn Fn(&mut LorenzConfig)| {
        let mut c = LorenzConfig::default();
        f(&mut c);
        Program::Lorenz(c)
    };
    let lu = |f: &dyn Fn(&mut LuConfig)| {
        let mut c = LuConfig::default();
        f(&mut c);
        Program::Lu(c)
    };
    let heat = |f: &dyn Fn(&mut HeatConfig)| {
        let mut c = HeatConfig::default();
        f(&mut c);
        Program::Heat(c)
    };
    Some(match put {
        PutId::A1 => vec![
            (ConstantShift, "sigma 10 -> 11", lorenz(&|c| c.sigma = 11.0)),
            (ConstantShift, "rho 28 -> 27", lorenz(&|c| c.rho = 27.0)),
            (ConstantShift, "z0 25 -> 26", lorenz(&|c| c.z0 = 26.0)),
            (ConstantShift, "base steps 50 -> 51", lorenz(&|c| c.base_steps = 51)),
            (ArithmeticSwap, "y0 = x -> y0 = -x", lorenz(&|c| c.y_scale = -1.0)),
            (ArithmeticSwap, "dx/dt: x -> |x| in the y equation", lorenz(&|c| c.fault = Some(LorenzFault::AbsCoupling))),
        ],
        PutId::A2 => vec![
            (ConstantShift, "c 4 -> 5", lu(&|c| c.c = 5.0)),
            (ConstantShift, "c 4 -> 3", lu(&|c| c.c = 3.0)),
            (ConstantShift, "base size 8 -> 9", lu(&|c| c.base_n = 9)),
            (ConstantShift, "diagonal exponent 2 -> 3", lu(&|c| c.diag_exponent = 3.0)),
            (ArithmeticSwap, "first update: - -> +", lu(&|c| c.fault = Some(LuFault::FlipFirstUpdate))),
            (ComparisonSwap, "pivot search: > -> >=", lu(&|c| c.pivot = PivotRule::PartialLastTie)),
        ],
        PutId::A3 => vec![
            (ConstantShift, "base cells 16 -> 17", heat(&|c| c.base_cells = 17)),
            (ConstantShift, "base steps 64 -> 65", heat(&|c| c.base_steps = 65)),
            (ConstantShift, "kappa 1 -> 0", heat(&|c| c.kappa = 0.0)),
            (ConstantShift, "extra time step (n -> n + 1)", heat(&|c| c.fault = Some(HeatFault::ExtraStep))),
            (ArithmeticSwap, "read-out u -> u - 0.1 u^2", heat(&|c| c.fault = Some(HeatFault::SaturatingReadout { coef: 0.1 }))),
            (ComparisonSwap, "amplitude branch: < -> >", heat(&|c| c.fault = Some(HeatFault::BranchFlip { above: 1.5 }))),
        ],
        _ => return None,
    })
}

/// Syntactic mutants of a deterministic-class PUT.
pub fn syntactic_mutants(put: PutId) -> Result<Vec<MutantRecord>> {
    let rules = rules(put).ok_or(HarnessError::NotDeterministicClass(put.to_string()))?;
    Ok(rules
        .into_iter()
        .enumerate()
        .map(|(n, (rule, description, evaluator))| MutantRecord {
            mutant_id: format!("{put}-SYN-{}-{}", rule.tag(), n + 1),
            put,
            operator: rule.operator(),
            kind: MutantKind::Syntactic,
            semanticity: SemanticityFlags::default(),
            artefact_flag: false,
            description: description.into(),
            evaluator,
        })
        .collect())
}
