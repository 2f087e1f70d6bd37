use super::*;
use crate::adequacy::{KillEvidence, OutcomeCoverage};
use crate::mr::MetaPattern;
use crate::mutation::OperatorClass;
use proptest::prelude::*;

fn evidence(class: PutClass) -> KilledEvidence {
    KilledEvidence {
        mutant_id: "X-1".into(),
        class,
        fail_ratio: 1.0,
        replicates: 20,
        ood: vec![(0.02, false), (0.05, false), (0.10, false)],
        methods: vec!["tolerance".into()],
        baselines: Vec::new(),
        artefact_flag: false,
        changed_parameters: 1,
    }
}

fn label(ev: &KilledEvidence) -> RootCause {
    diagnose(ev, &LrcaConfig::default()).unwrap().root_cause
}

#[test]
fn stable_kill_is_c1() {
    for class in [PutClass::A, PutClass::B, PutClass::C, PutClass::D] {
        let a = diagnose(&evidence(class), &LrcaConfig::default()).unwrap();
        assert_eq!(a.root_cause, RootCause::C1);
        assert!(a.co_occurring.is_empty());
    }
}

#[test]
fn unstable_kill_is_c2() {
    let ev = KilledEvidence { fail_ratio: 0.5, ..evidence(PutClass::A) };
    assert_eq!(label(&ev), RootCause::C2);
    // the cutoff itself is stable
    let ev = KilledEvidence { fail_ratio: 0.8, ..evidence(PutClass::A) };
    assert_eq!(label(&ev), RootCause::C1);
}

#[test]
fn ood_confinement_is_c3_only_for_c_and_d() {
    let confined = vec![(0.02, true), (0.05, true), (0.10, true)];
    for (class, want) in [
        (PutClass::A, RootCause::C1),
        (PutClass::B, RootCause::C1),
        (PutClass::C, RootCause::C3),
        (PutClass::D, RootCause::C3),
    ] {
        let ev = KilledEvidence { ood: confined.clone(), ..evidence(class) };
        assert_eq!(label(&ev), want, "{class:?}");
    }
}

#[test]
fn ood_band_selects_the_evidence_row() {
    let ev = KilledEvidence { ood: vec![(0.02, false), (0.05, false), (0.10, true)], ..evidence(PutClass::C) };
    assert_eq!(label(&ev), RootCause::C1);
    let wide = LrcaConfig { ood_band: 0.10, ..Default::default() };
    assert_eq!(diagnose(&ev, &wide).unwrap().root_cause, RootCause::C3);
}

#[test]
fn missing_ood_map_is_an_error() {
    let ev = KilledEvidence { ood: Vec::new(), ..evidence(PutClass::D) };
    assert!(matches!(diagnose(&ev, &LrcaConfig::default()), Err(HarnessError::MissingEvidence(_))));
    // A-class kills need no map
    let ev = KilledEvidence { ood: Vec::new(), ..evidence(PutClass::A) };
    assert_eq!(label(&ev), RootCause::C1);
}

fn wilcoxon(r: f64) -> AssumptionBaseline {
    AssumptionBaseline {
        mr_id: "W".into(),
        method: "wilcoxon".into(),
        rank_autocorrelation: Some(r),
        drift: None,
        spread: None,
    }
}

fn dtw(drift: f64, spread: f64) -> AssumptionBaseline {
    AssumptionBaseline { mr_id: "D".into(), method: "dtw".into(), rank_autocorrelation: None, drift: Some(drift), spread: Some(spread) }
}

#[test]
fn autocorrelated_baseline_is_c4_only_for_b_and_d() {
    for (class, want) in [
        (PutClass::A, RootCause::C1),
        (PutClass::B, RootCause::C4),
        (PutClass::C, RootCause::C1),
        (PutClass::D, RootCause::C4),
    ] {
        let ev = KilledEvidence { methods: vec!["wilcoxon".into()], baselines: vec![wilcoxon(0.7)], ..evidence(class) };
        assert_eq!(label(&ev), want, "{class:?}");
    }
    let ev = KilledEvidence { methods: vec!["wilcoxon".into()], baselines: vec![wilcoxon(0.5)], ..evidence(PutClass::B) };
    assert_eq!(label(&ev), RootCause::C1);
}

#[test]
fn dtw_drift_scales_with_the_multiplier() {
    let ev = KilledEvidence { methods: vec!["dtw".into()], baselines: vec![dtw(5.0, 1.0)], ..evidence(PutClass::D) };
    assert_eq!(label(&ev), RootCause::C4);
    let loose = LrcaConfig { tolerance_multiplier: 10.0, ..Default::default() };
    assert_eq!(diagnose(&ev, &loose).unwrap().root_cause, RootCause::C1);
}

#[test]
fn statistical_kill_without_baseline_is_an_error() {
    let ev = KilledEvidence { methods: vec!["dtw".into()], ..evidence(PutClass::B) };
    assert!(matches!(diagnose(&ev, &LrcaConfig::default()), Err(HarnessError::MissingEvidence(_))));
}

#[test]
fn artefacts_are_c5() {
    let flagged = KilledEvidence { artefact_flag: true, ..evidence(PutClass::A) };
    assert_eq!(label(&flagged), RootCause::C5);
    let over = KilledEvidence { changed_parameters: 4, ..evidence(PutClass::A) };
    assert_eq!(label(&over), RootCause::C5);
    let three = KilledEvidence { changed_parameters: 3, ..evidence(PutClass::A) };
    assert_eq!(label(&three), RootCause::C1);
}

#[test]
fn all_layers_firing_resolve_to_c5() {
    let ev = KilledEvidence {
        fail_ratio: 0.1,
        ood: vec![(0.02, true)],
        methods: vec!["wilcoxon".into()],
        baselines: vec![wilcoxon(0.9)],
        artefact_flag: true,
        ..evidence(PutClass::D)
    };
    let a = diagnose(&ev, &LrcaConfig::default()).unwrap();
    assert_eq!(a.co_occurring, vec![RootCause::C2, RootCause::C3, RootCause::C4, RootCause::C5]);
    assert_eq!(a.root_cause, RootCause::C5);
}

proptest! {
    #[test]
    fn label_is_priority_maximum(mask in 0u8..32) {
        let set: Vec<RootCause> = RootCause::ALL.iter().copied().filter(|c| mask & (1 << c.priority()) != 0).collect();
        let got = resolve(&set);
        prop_assert!(set.iter().all(|c| c.priority() <= got.priority()));
        prop_assert!(set.is_empty() && got == RootCause::C1 || set.contains(&got));
    }

    #[test]
    fn diagnosed_label_is_maximal_over_recorded_causes(
        fail_ratio in 0.0f64..=1.0,
        confined in any::<bool>(),
        r in -1.0f64..1.0,
        artefact in any::<bool>(),
        changed in 0usize..6,
        class in 0usize..4,
    ) {
        let class = [PutClass::A, PutClass::B, PutClass::C, PutClass::D][class];
        let ev = KilledEvidence {
            fail_ratio,
            ood: vec![(0.02, confined)],
            methods: vec!["wilcoxon".into()],
            baselines: vec![wilcoxon(r)],
            artefact_flag: artefact,
            changed_parameters: changed,
            ..evidence(class)
        };
        let a = diagnose(&ev, &LrcaConfig::default()).unwrap();
        let mut with_c1 = a.co_occurring.clone();
        with_c1.push(RootCause::C1);
        prop_assert_eq!(a.root_cause, *with_c1.iter().max().unwrap());
    }
}

fn outcome(state: MutantState, cause: Option<RootCause>) -> MutantOutcome {
    MutantOutcome {
        mutant_id: "m".into(),
        operator: OperatorClass::CE,
        state,
        fail_ratio: if state == MutantState::Killed { 1.0 } else { 0.0 },
        root_cause: cause,
        evidence: KillEvidence {
            e2_equivalent: false,
            e1_coherent: false,
            kill_replicates: 0,
            replicates: 20,
            killing_mrs: Vec::new(),
            ood: Vec::new(),
            artefact_flag: false,
            changed_parameters: 1,
        },
    }
}

fn cell(labels: &[RootCause], survivors: usize) -> CellResult {
    let mut per_mutant: Vec<MutantOutcome> = labels.iter().map(|&c| outcome(MutantState::Killed, Some(c))).collect();
    per_mutant.extend((0..survivors).map(|_| outcome(MutantState::Survived, None)));
    let inst = per_mutant.len();
    CellResult {
        put: PutId::A1,
        mp: MetaPattern::MP1,
        operator: None,
        aligned: true,
        mr_count: 1,
        inst_count: inst,
        equiv_count: 0,
        killed_count: labels.len(),
        survive_count: survivors,
        sms: Some(labels.len() as f64 / inst.max(1) as f64),
        inst_rate: 1.0,
        equiv_rate: 0.0,
        survive_rate: survivors as f64 / inst.max(1) as f64,
        c1_share: None,
        suspect_share: None,
        outcomes: OutcomeCoverage::default(),
        per_mutant,
        pool_size: inst,
    }
}

#[test]
fn share_arithmetic() {
    use RootCause::*;
    assert_eq!(shares(&cell(&[C1, C1, C1], 2)).unwrap(), (1.0, 0.0));
    assert_eq!(shares(&cell(&[C1, C2, C3, C4, C5], 0)).unwrap(), (0.2, 0.8));
    assert_eq!(shares(&cell(&[], 4)), Err(HarnessError::NoKills));
}

fn with_shares(labels: &[RootCause]) -> CellResult {
    let mut c = cell(labels, 0);
    if let Ok((a, b)) = shares(&c) {
        c.c1_share = Some(a);
        c.suspect_share = Some(b);
    }
    c
}

#[test]
fn sweep_bounds() {
    use RootCause::*;
    let cells = vec![with_shares(&[C1, C1]), with_shares(&[C1, C2]), with_shares(&[C5]), with_shares(&[])];
    let rows = h4_cutoff_sweep(&cells, &[0.0, 0.5, 1.0]).unwrap();
    assert_eq!(rows.iter().map(|r| r.count).collect::<Vec<_>>(), vec![1, 2, 3]);
    assert!(rows.iter().all(|r| r.total == 3));
    assert!(h4_cutoff_sweep(&cells, &[]).is_err());
}

proptest! {
    #[test]
    fn sweep_is_monotone(suspects in proptest::collection::vec(0usize..5, 1..20)) {
        let cells: Vec<CellResult> = suspects
            .iter()
            .map(|&k| {
                let mut l = vec![RootCause::C2; k];
                l.extend(std::iter::repeat(RootCause::C1).take(5 - k));
                with_shares(&l)
            })
            .collect();
        let rows = h4_cutoff_sweep(&cells, &dense_cutoffs()).unwrap();
        prop_assert!(rows.windows(2).all(|w| w[0].ratio <= w[1].ratio));
    }
}

#[test]
fn grids() {
    assert_eq!(nine_grid().len(), 9);
    let c = dense_cutoffs();
    assert_eq!(c.len(), 10);
    assert!((c[0] - 0.05).abs() < 1e-12 && (c[9] - 0.5).abs() < 1e-12);
}

#[test]
fn config_validation() {
    assert!(LrcaConfig::default().validate().is_ok());
    for bad in [
        LrcaConfig { fail_ratio_cutoff: 0.0, ..Default::default() },
        LrcaConfig { fail_ratio_cutoff: 1.5, ..Default::default() },
        LrcaConfig { ood_band: 0.03, ..Default::default() },
        LrcaConfig { tolerance_multiplier: 5.0, ..Default::default() },
        LrcaConfig { replicates: 10, ..Default::default() },
    ] {
        assert!(matches!(bad.validate(), Err(HarnessError::ConfigInvalid(_))), "{bad:?}");
    }
}
