//! Replicated cells and the full campaign.
//!
//! The unit of work is one mutant against every relation of its PUT over all
//! replicates; cells are assembled from those verdict tables afterwards, so
//! the tensor and its 60-cell projection come from the same evaluations.

use super::{e2_against, e2_outputs, e2_samples, e2_stream_seed, equivalent_under, EquivalenceConfig, EquivalenceMode, MutantState};
use crate::avp::{avp_verify, avp_verify_within, Verdict};
use crate::error::{HarnessError, Result};
use crate::kernels::{Domain, Program, PutClass, PutId};
use crate::lrca::{LrcaConfig, RootCause};
use crate::mr::{mr_catalog, primary_mp, MetaPattern, MrInstance, TRAJECTORY_STEPS};
use crate::mutation::{self, MutantRecord, OperatorClass};
use crate::rng::{derive, tag};
use crate::stats::midranks;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

/// Out-of-distribution band widths for which L2 evidence is collected.
pub const OOD_BANDS: [f64; 3] = [0.02, 0.05, 0.10];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CampaignConfig {
    pub seed: u64,
    pub k_eq: usize,
    pub replicates: usize,
    pub eps_eq: f64,
    pub equivalence_mode: EquivalenceMode,
    pub bootstrap_iterations: usize,
    /// Iterations for the headline aligned-versus-cross CI.
    pub headline_bootstrap_iterations: usize,
    pub lrca: LrcaConfig,
    pub output_directory: PathBuf,
    /// PUTs to run; the default campaign uses all twelve.
    pub puts: Vec<PutId>,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        CampaignConfig {
            seed: 42,
            k_eq: 1000,
            replicates: 20,
            eps_eq: 1e-6,
            equivalence_mode: EquivalenceMode::E1AndE2,
            bootstrap_iterations: 1000,
            headline_bootstrap_iterations: 10_000,
            lrca: LrcaConfig::default(),
            output_directory: PathBuf::from("results"),
            puts: PutId::ALL.to_vec(),
        }
    }
}

impl CampaignConfig {
    pub fn equivalence(&self) -> EquivalenceConfig {
        EquivalenceConfig { k_eq: self.k_eq, eps_eq: self.eps_eq, mode: self.equivalence_mode }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(HarnessError::ConfigInvalid(m));
        if self.replicates == 0 {
            return bad("replicates must be at least 1".into());
        }
        self.equivalence().validate()?;
        if self.eps_eq == 0.0 {
            return bad("eps_eq = 0 is reserved for the degeneration check".into());
        }
        if self.bootstrap_iterations < 100 || self.headline_bootstrap_iterations < 100 {
            return bad("bootstrap iterations must be at least 100".into());
        }
        if self.puts.is_empty() {
            return bad("no PUTs selected".into());
        }
        let mut seen = self.puts.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.puts.len() {
            return bad("duplicate PUT in selection".into());
        }
        self.lrca.validate()
    }

    pub fn replicate_seed(&self, put: PutId, r: usize) -> u64 {
        derive(self.seed, &[tag("replicate"), put.index() as u64, r as u64])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct OutcomeCoverage {
    /// Some relation held on some mutant.
    pub pass: bool,
    /// Some relation was violated on some mutant.
    pub fail: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OodEvidence {
    pub band: f64,
    /// Every killing relation passes once its sources avoid the outer band.
    pub confined: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KillEvidence {
    pub e2_equivalent: bool,
    /// Verdict agreement on the first replicate (E1).
    pub e1_coherent: bool,
    pub kill_replicates: usize,
    pub replicates: usize,
    pub killing_mrs: Vec<String>,
    pub ood: Vec<OodEvidence>,
    pub artefact_flag: bool,
    pub changed_parameters: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MutantOutcome {
    pub mutant_id: String,
    pub operator: OperatorClass,
    pub state: MutantState,
    pub fail_ratio: f64,
    pub root_cause: Option<RootCause>,
    pub evidence: KillEvidence,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub put: PutId,
    pub mp: MetaPattern,
    /// `None` on the 60-cell projection, which pools operators.
    pub operator: Option<OperatorClass>,
    /// `mp` is the PUT's primary pattern.
    pub aligned: bool,
    pub mr_count: usize,
    pub inst_count: usize,
    pub equiv_count: usize,
    pub killed_count: usize,
    pub survive_count: usize,
    #[serde(with = "crate::sentinel::undefined")]
    pub sms: Option<f64>,
    pub inst_rate: f64,
    pub equiv_rate: f64,
    pub survive_rate: f64,
    #[serde(with = "crate::sentinel::undefined")]
    pub c1_share: Option<f64>,
    #[serde(with = "crate::sentinel::undefined")]
    pub suspect_share: Option<f64>,
    pub outcomes: OutcomeCoverage,
    pub per_mutant: Vec<MutantOutcome>,
    /// Authored mutants behind `inst_count` (denominator of `inst_rate`).
    pub pool_size: usize,
}

impl CellResult {
    pub fn partition_holds(&self) -> bool {
        self.equiv_count + self.killed_count + self.survive_count == self.inst_count
    }
}

/// Assumption pre-check numbers for a Wilcoxon or DTW relation, measured on
/// the unmutated PUT across replicates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MrBaseline {
    pub mr_id: String,
    pub method: String,
    /// Lag-1 autocorrelation of the ranks of repeated outputs (Wilcoxon).
    pub rank_autocorrelation: Option<f64>,
    /// Difference between the late and early halves of per-replicate
    /// trajectory means (DTW).
    pub drift: Option<f64>,
    pub spread: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PutCoverage {
    pub put: PutId,
    pub coverage: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignResults {
    pub tool_version: String,
    pub config: CampaignConfig,
    /// (PUT, pattern, operator) cells in key order.
    pub tensor: Vec<CellResult>,
    /// (PUT, pattern) cells pooling all operators, in key order.
    pub cells: Vec<CellResult>,
    pub pattern_coverage: Vec<PutCoverage>,
    pub mr_baselines: Vec<MrBaseline>,
}

impl CampaignResults {
    pub fn baseline(&self, mr_id: &str) -> Option<&MrBaseline> {
        self.mr_baselines.iter().find(|b| b.mr_id == mr_id)
    }
}

/// One mutant's verdict table: `fails[m][r]` for relation `m`, replicate `r`.
struct Evaluation {
    e2: bool,
    fails: Vec<Vec<bool>>,
}

struct PutRun<'a> {
    put: PutId,
    cfg: &'a CampaignConfig,
    original: Program,
    mrs: Vec<&'static MrInstance>,
    seeds: Vec<u64>,
    orig_pass: Vec<Vec<bool>>,
    e2_inputs: Vec<f64>,
    e2_reference: Vec<f64>,
}

fn verdict_table(program: &Program, mrs: &[&MrInstance], seeds: &[u64], stochastic: bool) -> Vec<Vec<bool>> {
    mrs.iter()
        .map(|mr| {
            let fail = |s: u64| avp_verify(program, mr, s).map_or(true, |v| v.verdict == Verdict::Fail);
            if stochastic {
                seeds.iter().map(|&s| fail(s)).collect()
            } else {
                // seed-independent kernel: one evaluation stands for every replicate
                vec![fail(seeds[0]); seeds.len()]
            }
        })
        .collect()
}

impl<'a> PutRun<'a> {
    fn new(put: PutId, cfg: &'a CampaignConfig, mps: &[MetaPattern]) -> PutRun<'a> {
        let original = Program::original(put);
        let mrs: Vec<&'static MrInstance> =
            mr_catalog().iter().filter(|m| m.put == put && mps.contains(&m.mp)).collect();
        let seeds: Vec<u64> = (0..cfg.replicates).map(|r| cfg.replicate_seed(put, r)).collect();
        let stochastic = put.descriptor().stochastic;
        let orig_pass = mrs
            .par_iter()
            .map(|mr| verdict_table(&original, &[mr], &seeds, stochastic).remove(0).into_iter().map(|f| !f).collect())
            .collect();
        let e2_seed = e2_stream_seed(put, cfg.seed);
        let e2_inputs = e2_samples(put, cfg.k_eq, cfg.seed).inputs();
        let e2_reference = e2_outputs(&original, &e2_inputs, e2_seed);
        PutRun { put, cfg, original, mrs, seeds, orig_pass, e2_inputs, e2_reference }
    }

    fn e2_seed(&self) -> u64 {
        e2_stream_seed(self.put, self.cfg.seed)
    }

    fn evaluate(&self, m: &MutantRecord) -> Evaluation {
        let e2 = e2_against(&self.e2_reference, &m.evaluator, &self.e2_inputs, self.cfg.eps_eq, self.e2_seed());
        let fails = verdict_table(&m.evaluator, &self.mrs, &self.seeds, self.put.descriptor().stochastic);
        Evaluation { e2, fails }
    }

    /// Outcome of one mutant in the cell of pattern `mp`.
    fn outcome(&self, m: &MutantRecord, ev: &Evaluation, mp: MetaPattern) -> (MutantOutcome, OutcomeCoverage) {
        let idx: Vec<usize> = (0..self.mrs.len()).filter(|&i| self.mrs[i].mp == mp).collect();
        let n = self.seeds.len();
        let kills_in = |r: usize| idx.iter().any(|&i| self.orig_pass[i][r] && ev.fails[i][r]);
        let e1 = idx.iter().all(|&i| self.orig_pass[i][0] != ev.fails[i][0]);
        let equivalent = equivalent_under(self.cfg.equivalence_mode, ev.e2, || e1);
        let kill_replicates = if equivalent { 0 } else { (0..n).filter(|&r| kills_in(r)).count() };
        let state = if equivalent {
            MutantState::Equivalent
        } else if kill_replicates > 0 {
            MutantState::Killed
        } else {
            MutantState::Survived
        };
        let killing: Vec<usize> = if state == MutantState::Killed {
            idx.iter().copied().filter(|&i| (0..n).any(|r| self.orig_pass[i][r] && ev.fails[i][r])).collect()
        } else {
            Vec::new()
        };
        let ood = if state == MutantState::Killed && matches!(self.put.class(), PutClass::C | PutClass::D) {
            OOD_BANDS.iter().map(|&band| OodEvidence { band, confined: self.confined(m, ev, &killing, band) }).collect()
        } else {
            Vec::new()
        };
        let mut coverage = OutcomeCoverage::default();
        for &i in &idx {
            coverage.fail |= ev.fails[i].iter().any(|&f| f);
            coverage.pass |= ev.fails[i].iter().any(|&f| !f);
        }
        let outcome = MutantOutcome {
            mutant_id: m.mutant_id.clone(),
            operator: m.operator,
            state,
            fail_ratio: kill_replicates as f64 / n as f64,
            root_cause: None,
            evidence: KillEvidence {
                e2_equivalent: ev.e2,
                e1_coherent: e1,
                kill_replicates,
                replicates: n,
                killing_mrs: killing.iter().map(|&i| self.mrs[i].mr_id.clone()).collect(),
                ood,
                artefact_flag: m.artefact_flag,
                changed_parameters: m.evaluator.changed_parameters(),
            },
        };
        (outcome, coverage)
    }

    /// Whether every killing relation passes, at its first killing
    /// replicate, with sources kept out of the outer `band` of the domain.
    fn confined(&self, m: &MutantRecord, ev: &Evaluation, killing: &[usize], band: f64) -> bool {
        let d = self.put.descriptor().input_domain;
        let inner = Domain::new(d.lo + band * d.width(), d.hi - band * d.width());
        killing.iter().all(|&i| {
            let r = (0..self.seeds.len()).find(|&r| self.orig_pass[i][r] && ev.fails[i][r]).unwrap_or(0);
            avp_verify_within(&m.evaluator, self.mrs[i], self.seeds[r], Some(inner)).is_ok_and(|v| v.passed())
        })
    }

    fn baselines(&self) -> Vec<MrBaseline> {
        if !matches!(self.put.class(), PutClass::B | PutClass::D) {
            return Vec::new();
        }
        self.mrs
            .iter()
            .filter(|mr| mr.relation.uses_wilcoxon() || mr.relation.uses_dtw())
            .map(|mr| {
                let x0 = mr.source_inputs()[0];
                let mut b = MrBaseline {
                    mr_id: mr.mr_id.clone(),
                    method: mr.method().into(),
                    rank_autocorrelation: None,
                    drift: None,
                    spread: None,
                };
                if mr.relation.uses_wilcoxon() {
                    let ys: Vec<f64> = self.seeds.iter().map(|&s| self.original.fit(s, 0).eval(x0)).collect();
                    b.rank_autocorrelation = Some(lag1_rank_autocorrelation(&ys));
                } else {
                    let means: Vec<f64> = self
                        .seeds
                        .iter()
                        .map(|&s| {
                            let t = self.original.fit(s, 0).trajectory(x0, TRAJECTORY_STEPS).unwrap_or_default();
                            t.iter().sum::<f64>() / t.len().max(1) as f64
                        })
                        .collect();
                    let (drift, spread) = drift_and_spread(&means);
                    b.drift = Some(drift);
                    b.spread = Some(spread);
                }
                b
            })
            .collect()
    }
}

/// Lag-1 Pearson autocorrelation of midranks; zero for a constant series.
pub(crate) fn lag1_rank_autocorrelation(ys: &[f64]) -> f64 {
    if ys.len() < 3 {
        return 0.0;
    }
    let r = midranks(ys);
    let (a, b) = (&r[..r.len() - 1], &r[1..]);
    let ma = a.iter().sum::<f64>() / a.len() as f64;
    let mb = b.iter().sum::<f64>() / b.len() as f64;
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
    if va == 0.0 || vb == 0.0 {
        0.0
    } else {
        cov / (va * vb).sqrt()
    }
}

/// |mean(late half) - mean(early half)| and the population sd of the series.
pub(crate) fn drift_and_spread(means: &[f64]) -> (f64, f64) {
    let n = means.len();
    if n < 2 {
        return (0.0, 0.0);
    }
    let avg = |s: &[f64]| s.iter().sum::<f64>() / s.len() as f64;
    let h = n / 2;
    let drift = (avg(&means[h..]) - avg(&means[..h])).abs();
    let m = avg(means);
    let spread = (means.iter().map(|v| (v - m).powi(2)).sum::<f64>() / n as f64).sqrt();
    (drift, spread)
}

pub(crate) fn assemble(
    put: PutId,
    mp: MetaPattern,
    operator: Option<OperatorClass>,
    mr_count: usize,
    pool_size: usize,
    entries: Vec<(MutantOutcome, OutcomeCoverage)>,
) -> CellResult {
    let count = |s: MutantState| entries.iter().filter(|(o, _)| o.state == s).count();
    let inst = entries.len();
    let (equiv, killed, survived) = (count(MutantState::Equivalent), count(MutantState::Killed), count(MutantState::Survived));
    let rate = |k: usize, of: usize| if of == 0 { 0.0 } else { k as f64 / of as f64 };
    let mut outcomes = OutcomeCoverage::default();
    for (_, c) in &entries {
        outcomes.pass |= c.pass;
        outcomes.fail |= c.fail;
    }
    CellResult {
        put,
        mp,
        operator,
        aligned: mp == primary_mp(put),
        mr_count,
        inst_count: inst,
        equiv_count: equiv,
        killed_count: killed,
        survive_count: survived,
        sms: super::compute_sms(inst, equiv, killed).ok(),
        inst_rate: rate(inst, pool_size),
        equiv_rate: rate(equiv, inst),
        survive_rate: rate(survived, inst),
        c1_share: None,
        suspect_share: None,
        outcomes,
        per_mutant: entries.into_iter().map(|(o, _)| o).collect(),
        pool_size,
    }
}

fn authored_count(put: PutId, op: OperatorClass) -> usize {
    mutation::authored(put).iter().filter(|m| m.operator == op).count()
}

/// A single (PUT, pattern, operator) cell, replicated `config.replicates` times.
pub fn run_cell(put: PutId, mp: MetaPattern, operator: OperatorClass, config: &CampaignConfig) -> Result<CellResult> {
    config.validate()?;
    if mp.index().is_none() {
        return Err(HarnessError::UnknownMetaPattern);
    }
    let run = PutRun::new(put, config, &[mp]);
    let mutants = mutation::catalog(put, operator);
    let entries = mutants
        .par_iter()
        .map(|m| {
            let ev = run.evaluate(m);
            run.outcome(m, &ev, mp)
        })
        .collect();
    Ok(assemble(put, mp, Some(operator), run.mrs.len(), authored_count(put, operator), entries))
}

/// The full campaign on the current rayon pool.
pub fn run_campaign(config: &CampaignConfig) -> Result<CampaignResults> {
    config.validate()?;
    let mut puts = config.puts.clone();
    puts.sort();
    let runs: Vec<PutRun> = puts.iter().map(|&p| PutRun::new(p, config, &MetaPattern::CAMPAIGN)).collect();
    let units: Vec<(usize, MutantRecord)> =
        puts.iter().enumerate().flat_map(|(i, &p)| mutation::pool(p).into_iter().map(move |m| (i, m))).collect();
    // per mutant: one (outcome, coverage) per campaign pattern
    let outcomes: Vec<Vec<(MutantOutcome, OutcomeCoverage)>> = units
        .par_iter()
        .map(|(i, m)| {
            let run = &runs[*i];
            let ev = run.evaluate(m);
            MetaPattern::CAMPAIGN.iter().map(|&mp| run.outcome(m, &ev, mp)).collect()
        })
        .collect();

    let mut tensor = Vec::with_capacity(puts.len() * 25);
    let mut cells = Vec::with_capacity(puts.len() * 5);
    let mut coverage = Vec::with_capacity(puts.len());
    for (i, run) in runs.iter().enumerate() {
        let put = run.put;
        let mine: Vec<(&MutantRecord, &Vec<(MutantOutcome, OutcomeCoverage)>)> =
            units.iter().zip(&outcomes).filter(|((j, _), _)| *j == i).map(|((_, m), o)| (m, o)).collect();
        let mut put_cells = Vec::with_capacity(5);
        for (k, &mp) in MetaPattern::CAMPAIGN.iter().enumerate() {
            let mr_count = run.mrs.iter().filter(|m| m.mp == mp).count();
            let mut pooled = Vec::new();
            let mut pool_size = 0;
            for op in OperatorClass::ALL {
                let entries: Vec<_> = mine.iter().filter(|(m, _)| m.operator == op).map(|(_, o)| o[k].clone()).collect();
                pooled.extend(entries.iter().cloned());
                let authored = authored_count(put, op);
                pool_size += authored;
                tensor.push(assemble(put, mp, Some(op), mr_count, authored, entries));
            }
            put_cells.push(assemble(put, mp, None, mr_count, pool_size, pooled));
        }
        coverage.push(PutCoverage { put, coverage: super::pattern_coverage(&put_cells) });
        cells.extend(put_cells);
    }
    let mr_baselines = runs.par_iter().map(|r| r.baselines()).collect::<Vec<_>>().concat();
    Ok(CampaignResults {
        tool_version: env!("CARGO_PKG_VERSION").into(),
        config: config.clone(),
        tensor,
        cells,
        pattern_coverage: coverage,
        mr_baselines,
    })
}

/// As [`run_campaign`] on a dedicated pool of `workers` threads. Results do
/// not depend on the worker count.
pub fn run_campaign_with_workers(config: &CampaignConfig, workers: usize) -> Result<CampaignResults> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| HarnessError::ConfigInvalid(format!("worker pool: {e}")))?;
    pool.install(|| run_campaign(config))
}
