//! The degenerate limit: exact output comparison, a large shared sample set,
//! the equality pattern only, syntactic mutants and deterministic A-class
//! PUTs. Under it SMS must equal the classical mutation score and every kill
//! must be labelled C1.

use crate::adequacy::{
    assemble_cell, compute_sms, e1_avp_coherence, e2_output_equivalence, e2_samples, equivalent_under, killed_determination,
    CellResult, EquivalenceConfig, EquivalenceMode, KillEvidence, MutantOutcome, MutantState, OutcomeCoverage,
};
use crate::error::{HarnessError, Result};
use crate::kernels::{Program, PutClass, PutId};
use crate::lrca::{diagnose, KilledEvidence, LrcaConfig, RootCause};
use crate::mr::{MetaPattern, MrInstance};
use crate::mutation::{syntactic_mutants, MutantKind, MutantRecord};
use crate::sentinel;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Smallest sample count accepted as "elevated".
pub const DEGENERATE_K_EQ: usize = 100_000;

/// The six conditions of the limit. Each must be set; they are not
/// independent knobs, so a partial setting is rejected rather than run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegenerateLimitConfig {
    pub eps_eq: Option<f64>,
    pub k_eq: Option<usize>,
    pub eps_avp: Option<f64>,
    pub mp_set: Option<Vec<MetaPattern>>,
    pub operator_source: Option<MutantKind>,
    pub put_subset: Option<Vec<PutId>>,
}

impl Default for DegenerateLimitConfig {
    fn default() -> Self {
        DegenerateLimitConfig {
            eps_eq: Some(0.0),
            k_eq: Some(DEGENERATE_K_EQ),
            eps_avp: Some(0.0),
            mp_set: Some(vec![MetaPattern::MPEq]),
            operator_source: Some(MutantKind::Syntactic),
            put_subset: Some(PutClass::A.members().to_vec()),
        }
    }
}

impl DegenerateLimitConfig {
    pub fn validate(&self) -> Result<()> {
        let mut missing = Vec::new();
        if self.eps_eq != Some(0.0) {
            missing.push("eps_eq must be 0");
        }
        if !self.k_eq.is_some_and(|k| k >= DEGENERATE_K_EQ) {
            missing.push("k_eq must be at least 100000");
        }
        if self.eps_avp != Some(0.0) {
            missing.push("eps_avp must be 0");
        }
        if self.mp_set.as_deref() != Some(&[MetaPattern::MPEq][..]) {
            missing.push("mp_set must be exactly MP_eq");
        }
        if self.operator_source != Some(MutantKind::Syntactic) {
            missing.push("operator_source must be syntactic");
        }
        match &self.put_subset {
            Some(p) if !p.is_empty() && p.iter().all(|p| p.class() == PutClass::A && !p.descriptor().stochastic) => {}
            _ => missing.push("put_subset must be nonempty deterministic A-class PUTs"),
        }
        if missing.is_empty() {
            Ok(())
        } else {
            Err(HarnessError::ConfigIncomplete(missing.join("; ")))
        }
    }

    fn k(&self) -> usize {
        self.k_eq.unwrap_or(DEGENERATE_K_EQ)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicScore {
    pub mutants: usize,
    pub killed: usize,
    pub equivalent: usize,
    pub equivalent_ids: Vec<String>,
    #[serde(with = "sentinel::undefined")]
    pub ms: Option<f64>,
}

fn classic_counts(put: PutId, mutants: &[MutantRecord], k_eq: usize, seed: u64) -> Result<ClassicScore> {
    if put.descriptor().stochastic {
        return Err(HarnessError::NotDeterministicClass(put.to_string()));
    }
    if let Some(m) = mutants.iter().find(|m| m.kind != MutantKind::Syntactic || m.put != put) {
        return Err(HarnessError::InvalidArgument(format!("{} is not a syntactic mutant of {put}", m.mutant_id)));
    }
    let xs = e2_samples(put, k_eq, seed).inputs();
    let original = Program::original(put);
    let fitted = original.fit(seed, 0);
    let reference: Vec<f64> = xs.iter().map(|&x| fitted.eval(x)).collect();
    let differs: Vec<bool> = mutants
        .par_iter()
        .map(|m| {
            let f = m.evaluator.fit(seed, 0);
            xs.iter().zip(&reference).any(|(&x, r)| {
                let y = f.eval(x);
                y.is_nan() || r.is_nan() || y.to_bits() != r.to_bits()
            })
        })
        .collect();
    let killed = differs.iter().filter(|&&d| d).count();
    let equivalent_ids: Vec<String> =
        mutants.iter().zip(&differs).filter(|(_, d)| !**d).map(|(m, _)| m.mutant_id.clone()).collect();
    Ok(ClassicScore {
        mutants: mutants.len(),
        killed,
        equivalent: equivalent_ids.len(),
        equivalent_ids,
        ms: compute_sms(mutants.len(), mutants.len() - killed, killed).ok(),
    })
}

/// Classical mutation score: killed if some sample output differs bitwise
/// (NaN differs from everything), equivalent if all `k_eq` agree.
pub fn classic_ms(put: PutId, mutants: &[MutantRecord], k_eq: usize, seed: u64) -> Result<f64> {
    classic_counts(put, mutants, k_eq, seed)?.ms.ok_or(HarnessError::AllEquivalent)
}

/// One degenerate-limit run of the adequacy engine over a PUT.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegenerateRun {
    pub put: PutId,
    pub seed: u64,
    pub k_eq: usize,
    pub relation: MrInstance,
    pub cell: CellResult,
    pub classic: ClassicScore,
}

/// Runs the engine under the limit on an explicit mutant set.
pub fn run_degenerate(put: PutId, cfg: &DegenerateLimitConfig, seed: u64, mutants: &[MutantRecord]) -> Result<DegenerateRun> {
    cfg.validate()?;
    if !cfg.put_subset.as_ref().is_some_and(|s| s.contains(&put)) {
        return Err(HarnessError::NotDeterministicClass(put.to_string()));
    }
    let k_eq = cfg.k();
    let relation = MrInstance::equality(put, e2_samples(put, k_eq, seed));
    let eq = EquivalenceConfig { k_eq, eps_eq: 0.0, mode: EquivalenceMode::E1AndE2 };
    let original = Program::original(put);
    let mrs = std::slice::from_ref(&relation);
    let entries: Vec<(MutantOutcome, OutcomeCoverage)> = mutants
        .par_iter()
        .map(|m| {
            let e2 = e2_output_equivalence(&original, &m.evaluator, &eq, seed);
            let e1 = e1_avp_coherence(&original, &m.evaluator, mrs, seed);
            let state = if equivalent_under(eq.mode, e2, || e1) {
                MutantState::Equivalent
            } else if killed_determination(&original, &m.evaluator, mrs, seed) {
                MutantState::Killed
            } else {
                MutantState::Survived
            };
            let killed = state == MutantState::Killed;
            let outcome = MutantOutcome {
                mutant_id: m.mutant_id.clone(),
                operator: m.operator,
                state,
                fail_ratio: if killed { 1.0 } else { 0.0 },
                root_cause: None,
                evidence: KillEvidence {
                    e2_equivalent: e2,
                    e1_coherent: e1,
                    kill_replicates: killed as usize,
                    replicates: 1,
                    killing_mrs: if killed { vec![relation.mr_id.clone()] } else { Vec::new() },
                    ood: Vec::new(),
                    artefact_flag: m.artefact_flag,
                    changed_parameters: m.evaluator.changed_parameters(),
                },
            };
            (outcome, OutcomeCoverage { pass: !killed, fail: killed })
        })
        .collect();
    let cell = assemble_cell(put, MetaPattern::MPEq, None, 1, mutants.len(), entries);
    let classic = classic_counts(put, mutants, k_eq, seed)?;
    Ok(DegenerateRun { put, seed, k_eq, relation, cell, classic })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrivialisationReport {
    pub labels: BTreeMap<RootCause, usize>,
    #[serde(with = "sentinel::undefined")]
    pub suspect_share: Option<f64>,
}

/// Every kill of a degenerate run must be labelled C1.
pub fn check_lrca_trivialisation(run: &DegenerateRun) -> Result<TrivialisationReport> {
    let cfg = LrcaConfig::default();
    let mut labels = BTreeMap::new();
    let mut offenders = Vec::new();
    for o in run.cell.per_mutant.iter().filter(|o| o.state == MutantState::Killed) {
        let ev = KilledEvidence {
            mutant_id: o.mutant_id.clone(),
            class: run.put.class(),
            fail_ratio: o.fail_ratio,
            replicates: o.evidence.replicates,
            ood: Vec::new(),
            methods: vec![run.relation.method().to_string()],
            baselines: Vec::new(),
            artefact_flag: o.evidence.artefact_flag,
            changed_parameters: o.evidence.changed_parameters,
        };
        let a = diagnose(&ev, &cfg)?;
        *labels.entry(a.root_cause).or_insert(0) += 1;
        if a.root_cause != RootCause::C1 {
            offenders.push(format!("{} labelled {} ({})", o.mutant_id, a.root_cause, a.evidence));
        }
    }
    let killed = run.cell.killed_count;
    let suspect_share = (killed > 0).then(|| 1.0 - labels.get(&RootCause::C1).copied().unwrap_or(0) as f64 / killed as f64);
    if !offenders.is_empty() {
        return Err(HarnessError::TrivialisationViolated(offenders.join("; ")));
    }
    Ok(TrivialisationReport { labels, suspect_share })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegenerationReport {
    pub put: PutId,
    pub seed: u64,
    pub k_eq: usize,
    pub mutants: usize,
    pub sms_equivalent: usize,
    pub sms_killed: usize,
    pub ms_equivalent: usize,
    pub ms_killed: usize,
    #[serde(with = "sentinel::undefined")]
    pub sms: Option<f64>,
    #[serde(with = "sentinel::undefined")]
    pub ms: Option<f64>,
    pub equal: bool,
    pub trivialisation: TrivialisationReport,
}

/// Compares a run's SMS side with its classical side, count for count.
pub fn compare(run: &DegenerateRun) -> Result<DegenerationReport> {
    let c = &run.cell;
    let equal = c.equiv_count == run.classic.equivalent
        && c.killed_count == run.classic.killed
        && c.survive_count == 0
        && c.sms.map(f64::to_bits) == run.classic.ms.map(f64::to_bits);
    if !equal {
        return Err(HarnessError::MismatchDetected {
            put: run.put.to_string(),
            sms: c.sms.unwrap_or(f64::NAN),
            ms: run.classic.ms.unwrap_or(f64::NAN),
        });
    }
    let trivialisation = check_lrca_trivialisation(run)?;
    Ok(DegenerationReport {
        put: run.put,
        seed: run.seed,
        k_eq: run.k_eq,
        mutants: c.inst_count,
        sms_equivalent: c.equiv_count,
        sms_killed: c.killed_count,
        ms_equivalent: run.classic.equivalent,
        ms_killed: run.classic.killed,
        sms: c.sms,
        ms: run.classic.ms,
        equal,
        trivialisation,
    })
}

/// The degeneration check on the PUT's syntactic mutants.
pub fn check_degeneration(put: PutId, cfg: &DegenerateLimitConfig, seed: u64) -> Result<DegenerationReport> {
    cfg.validate()?;
    let mutants = syntactic_mutants(put)?;
    compare(&run_degenerate(put, cfg, seed, &mutants)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{LuConfig, LuFault};

    #[test]
    fn default_config_is_complete() {
        assert!(DegenerateLimitConfig::default().validate().is_ok());
    }

    #[test]
    fn every_axis_is_enforced() {
        let d = DegenerateLimitConfig::default;
        let partial = [
            DegenerateLimitConfig { eps_eq: Some(1e-6), ..d() },
            DegenerateLimitConfig { eps_eq: None, ..d() },
            DegenerateLimitConfig { k_eq: Some(1000), ..d() },
            DegenerateLimitConfig { eps_avp: Some(1e-9), ..d() },
            DegenerateLimitConfig { mp_set: Some(vec![MetaPattern::MPEq, MetaPattern::MP1]), ..d() },
            DegenerateLimitConfig { operator_source: Some(MutantKind::Semantic), ..d() },
            DegenerateLimitConfig { put_subset: Some(vec![PutId::A1, PutId::B1]), ..d() },
            DegenerateLimitConfig { put_subset: Some(vec![]), ..d() },
        ];
        for cfg in partial {
            assert!(matches!(cfg.validate(), Err(HarnessError::ConfigIncomplete(_))), "{cfg:?}");
            assert!(matches!(check_degeneration(PutId::A2, &cfg, 1), Err(HarnessError::ConfigIncomplete(_))));
        }
    }

    fn syntactic(put: PutId, id: &str, evaluator: Program) -> MutantRecord {
        MutantRecord {
            mutant_id: id.into(),
            put,
            operator: crate::mutation::OperatorClass::HP,
            kind: MutantKind::Syntactic,
            semanticity: Default::default(),
            artefact_flag: false,
            description: id.into(),
            evaluator,
        }
    }

    #[test]
    fn classic_score_fixtures() {
        let same = syntactic(PutId::A2, "same", Program::original(PutId::A2));
        let shifted = syntactic(
            PutId::A2,
            "shift",
            Program::Lu(LuConfig { fault: Some(LuFault::OutputOffset { offset: 0.5 }), ..Default::default() }),
        );
        let c = classic_counts(PutId::A2, &[same.clone(), shifted.clone()], 500, 3).unwrap();
        assert_eq!((c.killed, c.equivalent), (1, 1));
        assert_eq!(c.equivalent_ids, vec!["same".to_string()]);
        assert_eq!(classic_ms(PutId::A2, &[same.clone(), shifted], 500, 3).unwrap(), 1.0);
        assert_eq!(classic_ms(PutId::A2, &[same], 500, 3), Err(HarnessError::AllEquivalent));
        assert!(classic_ms(PutId::B2, &[], 10, 3).is_err());
    }

    #[test]
    fn syntactic_constant_mutant_on_a2_is_killed() {
        let muts = syntactic_mutants(PutId::A2).unwrap();
        let m = muts.iter().find(|m| m.mutant_id.contains("const")).unwrap();
        let c = classic_counts(PutId::A2, std::slice::from_ref(m), 1000, 42).unwrap();
        assert_eq!(c.killed, 1);
    }

    #[test]
    fn equivalent_set_shrinks_with_more_samples() {
        let muts = syntactic_mutants(PutId::A3).unwrap();
        let mut last = usize::MAX;
        for k in [1, 10, 100, 1000] {
            let c = classic_counts(PutId::A3, &muts, k, 7).unwrap();
            assert!(c.equivalent <= last);
            last = c.equivalent;
        }
    }

    #[test]
    fn a2_degenerates_exactly() {
        let r = check_degeneration(PutId::A2, &DegenerateLimitConfig::default(), 42).unwrap();
        assert!(r.equal);
        assert_eq!(r.sms, r.ms);
        assert_eq!(r.trivialisation.suspect_share, Some(0.0));
        assert_eq!(r.trivialisation.labels.keys().collect::<Vec<_>>(), vec![&RootCause::C1]);
    }

    #[test]
    fn tampered_score_is_detected() {
        let muts = syntactic_mutants(PutId::A2).unwrap();
        let healthy = run_degenerate(PutId::A2, &DegenerateLimitConfig::default(), 42, &muts).unwrap();
        assert!(compare(&healthy).is_ok());

        let mut off_by_one = healthy.clone();
        off_by_one.cell.killed_count -= 1;
        off_by_one.cell.survive_count += 1;
        assert!(matches!(compare(&off_by_one), Err(HarnessError::MismatchDetected { .. })));

        // a formula that ignores equivalents: killed / inst
        let mut wrong_formula = healthy.clone();
        wrong_formula.cell.sms = Some(wrong_formula.cell.killed_count as f64 / wrong_formula.cell.inst_count as f64);
        assert!(matches!(compare(&wrong_formula), Err(HarnessError::MismatchDetected { .. })));
    }

    #[test]
    fn flagged_artefact_breaks_trivialisation() {
        let mut muts = syntactic_mutants(PutId::A2).unwrap();
        for m in muts.iter_mut() {
            m.artefact_flag = true;
        }
        let run = run_degenerate(PutId::A2, &DegenerateLimitConfig::default(), 42, &muts).unwrap();
        assert!(matches!(check_lrca_trivialisation(&run), Err(HarnessError::TrivialisationViolated(_))));
    }

    #[test]
    fn stochastic_puts_are_refused() {
        let cfg = DegenerateLimitConfig::default();
        assert!(matches!(check_degeneration(PutId::B2, &cfg, 1), Err(HarnessError::NotDeterministicClass(_))));
    }
}
