//! Likely root-cause attribution (LRCA) for killed mutants.
//!
//! Each kill is checked by three layers plus an artefact recheck. Every
//! layer that fires records a cause; the reported label is the one with the
//! highest priority. Annotation is purely descriptive: it fills labels and
//! shares and never touches a count or an SMS value.

use crate::adequacy::{CampaignResults, CellResult, MutantOutcome, MutantState};
use crate::error::{HarnessError, Result};
use crate::kernels::{PutClass, PutId};
use crate::mr::mr_catalog;
use crate::sentinel;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// Ordered by priority: `C5 > C4 > C3 > C2 > C1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RootCause {
    /// True semantic failure.
    C1,
    /// Numerical-tolerance perturbation.
    C2,
    /// Out-of-distribution input.
    C3,
    /// Statistical-assumption violation.
    C4,
    /// Mutator artefact.
    C5,
}

impl RootCause {
    pub const ALL: [RootCause; 5] = [RootCause::C1, RootCause::C2, RootCause::C3, RootCause::C4, RootCause::C5];

    pub fn priority(self) -> u8 {
        self as u8
    }

    pub fn meaning(self) -> &'static str {
        match self {
            RootCause::C1 => "true semantic failure",
            RootCause::C2 => "tolerance perturbation",
            RootCause::C3 => "out-of-distribution",
            RootCause::C4 => "statistical-assumption violation",
            RootCause::C5 => "mutator artefact",
        }
    }
}

impl fmt::Display for RootCause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// The label for a set of recorded causes: its priority maximum, C1 if empty.
pub fn resolve(causes: &[RootCause]) -> RootCause {
    causes.iter().copied().max().unwrap_or(RootCause::C1)
}

pub const OOD_BAND_GRID: [f64; 3] = [0.02, 0.05, 0.10];
pub const TOLERANCE_MULTIPLIER_GRID: [f64; 3] = [3.0, 10.0, 30.0];
/// H4 threshold on a cell's suspect share.
pub const H4_THRESHOLD: f64 = 0.20;
/// Lag-1 rank autocorrelation above which repeated samples are not IID.
pub const AUTOCORRELATION_LIMIT: f64 = 0.5;
/// More changed parameters than this counts as over-injection.
pub const OVER_INJECTION: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LrcaConfig {
    pub fail_ratio_cutoff: f64,
    pub ood_band: f64,
    pub tolerance_multiplier: f64,
    pub replicates: usize,
}

impl Default for LrcaConfig {
    fn default() -> Self {
        LrcaConfig { fail_ratio_cutoff: 0.80, ood_band: 0.02, tolerance_multiplier: 3.0, replicates: 20 }
    }
}

impl LrcaConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.fail_ratio_cutoff > 0.0 && self.fail_ratio_cutoff <= 1.0) {
            return Err(HarnessError::ConfigInvalid(format!("fail_ratio_cutoff {} outside (0, 1]", self.fail_ratio_cutoff)));
        }
        if !OOD_BAND_GRID.contains(&self.ood_band) {
            return Err(HarnessError::ConfigInvalid(format!("ood_band {} not in {OOD_BAND_GRID:?}", self.ood_band)));
        }
        if !TOLERANCE_MULTIPLIER_GRID.contains(&self.tolerance_multiplier) {
            return Err(HarnessError::ConfigInvalid(format!(
                "tolerance_multiplier {} not in {TOLERANCE_MULTIPLIER_GRID:?}",
                self.tolerance_multiplier
            )));
        }
        if self.replicates != 20 {
            return Err(HarnessError::ConfigInvalid(format!("lrca replicates fixed at 20, got {}", self.replicates)));
        }
        Ok(())
    }
}

/// Baseline of the unmutated PUT for one statistical relation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssumptionBaseline {
    pub mr_id: String,
    pub method: String,
    pub rank_autocorrelation: Option<f64>,
    pub drift: Option<f64>,
    pub spread: Option<f64>,
}

/// What the layers look at for one killed mutant.
#[derive(Debug, Clone, PartialEq)]
pub struct KilledEvidence {
    pub mutant_id: String,
    pub class: PutClass,
    pub fail_ratio: f64,
    pub replicates: usize,
    /// `(band, confined)`: whether the killing relations pass once sources
    /// avoid the outer `band` of the domain.
    pub ood: Vec<(f64, bool)>,
    /// Verification method of every killing relation.
    pub methods: Vec<String>,
    /// Baselines of the killing relations that use a statistical test.
    pub baselines: Vec<AssumptionBaseline>,
    pub artefact_flag: bool,
    pub changed_parameters: usize,
}

impl KilledEvidence {
    /// Evidence for a killed outcome of `put` drawn from campaign results.
    pub fn gather(put: PutId, outcome: &MutantOutcome, results: &CampaignResults) -> Result<KilledEvidence> {
        if outcome.state != MutantState::Killed {
            return Err(HarnessError::MissingEvidence(format!("{} was not killed", outcome.mutant_id)));
        }
        let ev = &outcome.evidence;
        let mut methods = Vec::with_capacity(ev.killing_mrs.len());
        let mut baselines = Vec::new();
        for id in &ev.killing_mrs {
            let mr = mr_catalog()
                .iter()
                .find(|m| &m.mr_id == id)
                .ok_or_else(|| HarnessError::MissingEvidence(format!("unknown relation {id}")))?;
            methods.push(mr.method().to_string());
            if let Some(b) = results.baseline(id) {
                baselines.push(AssumptionBaseline {
                    mr_id: b.mr_id.clone(),
                    method: b.method.clone(),
                    rank_autocorrelation: b.rank_autocorrelation,
                    drift: b.drift,
                    spread: b.spread,
                });
            }
        }
        Ok(KilledEvidence {
            mutant_id: outcome.mutant_id.clone(),
            class: put.class(),
            fail_ratio: outcome.fail_ratio,
            replicates: ev.replicates,
            ood: ev.ood.iter().map(|o| (o.band, o.confined)).collect(),
            methods,
            baselines,
            artefact_flag: ev.artefact_flag,
            changed_parameters: ev.changed_parameters,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LrcaAnnotation {
    pub mutant_id: String,
    pub root_cause: RootCause,
    /// Every cause recorded by some layer, sorted by priority.
    pub co_occurring: Vec<RootCause>,
    pub evidence: String,
}

fn is_statistical(method: &str) -> bool {
    method == "wilcoxon" || method == "dtw"
}

/// Runs the layers over one kill.
pub fn diagnose(ev: &KilledEvidence, cfg: &LrcaConfig) -> Result<LrcaAnnotation> {
    if ev.replicates == 0 || !(0.0..=1.0).contains(&ev.fail_ratio) {
        return Err(HarnessError::MissingEvidence(format!("{}: no replicated fail ratio", ev.mutant_id)));
    }
    let mut causes = Vec::new();
    let mut notes = Vec::new();

    if ev.fail_ratio < cfg.fail_ratio_cutoff {
        causes.push(RootCause::C2);
        notes.push(format!("L1 fail_ratio {} < {}", ev.fail_ratio, cfg.fail_ratio_cutoff));
    }

    if matches!(ev.class, PutClass::C | PutClass::D) {
        let confined = ev
            .ood
            .iter()
            .find(|(band, _)| *band == cfg.ood_band)
            .map(|&(_, c)| c)
            .ok_or_else(|| HarnessError::MissingEvidence(format!("{}: no OOD map for band {}", ev.mutant_id, cfg.ood_band)))?;
        if confined {
            causes.push(RootCause::C3);
            notes.push(format!("L2 failures confined to outer {} band", cfg.ood_band));
        }
    }

    if matches!(ev.class, PutClass::B | PutClass::D) {
        let statistical = ev.methods.iter().filter(|m| is_statistical(m)).count();
        let checked: Vec<&AssumptionBaseline> = ev.baselines.iter().filter(|b| is_statistical(&b.method)).collect();
        if checked.len() < statistical {
            return Err(HarnessError::MissingEvidence(format!("{}: statistical relation without baseline", ev.mutant_id)));
        }
        for b in checked {
            let violated = match b.method.as_str() {
                "wilcoxon" => b.rank_autocorrelation.is_some_and(|r| r > AUTOCORRELATION_LIMIT),
                _ => match (b.drift, b.spread) {
                    (Some(d), Some(s)) => d > cfg.tolerance_multiplier * s,
                    _ => return Err(HarnessError::MissingEvidence(format!("{}: DTW baseline incomplete", b.mr_id))),
                },
            };
            if violated {
                causes.push(RootCause::C4);
                notes.push(format!("L3 {} baseline violates its assumption", b.mr_id));
                break;
            }
        }
    }

    if ev.artefact_flag || ev.changed_parameters > OVER_INJECTION {
        causes.push(RootCause::C5);
        notes.push(if ev.artefact_flag {
            "artefact flag set".to_string()
        } else {
            format!("{} parameters changed", ev.changed_parameters)
        });
    }

    causes.sort();
    causes.dedup();
    let root_cause = resolve(&causes);
    Ok(LrcaAnnotation {
        mutant_id: ev.mutant_id.clone(),
        root_cause,
        co_occurring: causes,
        evidence: if notes.is_empty() { "stable kill, no layer fired".into() } else { notes.join("; ") },
    })
}

/// `(c1_share, suspect_share)` of an annotated cell.
pub fn shares(cell: &CellResult) -> Result<(f64, f64)> {
    if cell.killed_count == 0 {
        return Err(HarnessError::NoKills);
    }
    let mut c1 = 0usize;
    for o in cell.per_mutant.iter().filter(|o| o.state == MutantState::Killed) {
        match o.root_cause {
            Some(RootCause::C1) => c1 += 1,
            Some(_) => {}
            None => return Err(HarnessError::MissingEvidence(format!("{} has no label", o.mutant_id))),
        }
    }
    let c1_share = c1 as f64 / cell.killed_count as f64;
    Ok((c1_share, 1.0 - c1_share))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellShares {
    pub put: PutId,
    pub mp: String,
    pub killed: usize,
    #[serde(with = "sentinel::undefined")]
    pub c1_share: Option<f64>,
    #[serde(with = "sentinel::undefined")]
    pub suspect_share: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MutantLabel {
    pub put: PutId,
    pub mp: String,
    #[serde(flatten)]
    pub annotation: LrcaAnnotation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoOccurrence {
    pub causes: Vec<RootCause>,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationEntry {
    pub ood_band: f64,
    pub tolerance_multiplier: f64,
    #[serde(with = "sentinel::undefined")]
    pub mean_c1_share: Option<f64>,
    /// Cells with defined shares and `suspect_share <= 0.20`.
    pub cells_meeting_h4: usize,
    pub cells_with_shares: usize,
    pub best: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationReport {
    pub entries: Vec<CalibrationEntry>,
    /// The primary setting: band 0.02, multiplier 3.0.
    pub primary: (f64, f64),
    /// Our best combination: most cells meeting H4, then highest mean C1 share.
    pub best: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub cutoff: f64,
    pub count: usize,
    pub total: usize,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LrcaReport {
    pub config: LrcaConfig,
    /// Shares of the 60 (PUT, pattern) cells.
    pub cells: Vec<CellShares>,
    pub labels: Vec<MutantLabel>,
    pub co_occurrence: Vec<CoOccurrence>,
    #[serde(with = "sentinel::undefined")]
    pub mean_suspect_share: Option<f64>,
    pub calibration: CalibrationReport,
    pub h4_sweep: Vec<SweepRow>,
}

fn annotate_cell(cell: &mut CellResult, results: &CampaignResults, cfg: &LrcaConfig) -> Result<Vec<LrcaAnnotation>> {
    let mut out = Vec::new();
    for o in cell.per_mutant.iter_mut() {
        if o.state != MutantState::Killed {
            o.root_cause = None;
            continue;
        }
        let a = diagnose(&KilledEvidence::gather(cell.put, o, results)?, cfg)?;
        o.root_cause = Some(a.root_cause);
        out.push(a);
    }
    match shares(cell) {
        Ok((c1, suspect)) => {
            cell.c1_share = Some(c1);
            cell.suspect_share = Some(suspect);
        }
        Err(HarnessError::NoKills) => {
            cell.c1_share = None;
            cell.suspect_share = None;
        }
        Err(e) => return Err(e),
    }
    Ok(out)
}

/// Labels every kill under `cfg` and fills the shares of every cell. Only
/// `root_cause`, `c1_share` and `suspect_share` change.
pub fn annotate(results: &CampaignResults, cfg: &LrcaConfig) -> Result<(CampaignResults, Vec<MutantLabel>)> {
    cfg.validate()?;
    let mut annotated = results.clone();
    annotated
        .tensor
        .par_iter_mut()
        .try_for_each(|c| annotate_cell(c, results, cfg).map(|_| ()))?;
    let labels: Vec<Vec<MutantLabel>> = annotated
        .cells
        .par_iter_mut()
        .map(|c| {
            let (put, mp) = (c.put, c.mp.to_string());
            annotate_cell(c, results, cfg)
                .map(|v| v.into_iter().map(|annotation| MutantLabel { put, mp: mp.clone(), annotation }).collect())
        })
        .collect::<Result<_>>()?;
    Ok((annotated, labels.concat()))
}

fn mean(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        None
    } else {
        Some(xs.iter().sum::<f64>() / xs.len() as f64)
    }
}

/// Mean suspect share over the cells whose shares are defined.
pub fn mean_suspect_share(cells: &[CellResult]) -> Option<f64> {
    mean(&cells.iter().filter_map(|c| c.suspect_share).collect::<Vec<_>>())
}

/// Re-annotates the 60 cells at every `(ood_band, tolerance_multiplier)` of
/// the grid. Only the two swept thresholds change; the cutoff stays.
pub fn calibrate(results: &CampaignResults, base: &LrcaConfig, grid: &[(f64, f64)]) -> Result<CalibrationReport> {
    let mut entries = grid
        .iter()
        .map(|&(ood_band, tolerance_multiplier)| {
            let cfg = LrcaConfig { ood_band, tolerance_multiplier, ..base.clone() };
            let (annotated, _) = annotate(results, &cfg)?;
            let defined: Vec<&CellResult> = annotated.cells.iter().filter(|c| c.c1_share.is_some()).collect();
            Ok(CalibrationEntry {
                ood_band,
                tolerance_multiplier,
                mean_c1_share: mean(&defined.iter().filter_map(|c| c.c1_share).collect::<Vec<_>>()),
                cells_meeting_h4: defined.iter().filter(|c| c.suspect_share.is_some_and(|s| s <= H4_THRESHOLD)).count(),
                cells_with_shares: defined.len(),
                best: false,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut best = 0;
    for (i, e) in entries.iter().enumerate() {
        let b = &entries[best];
        let better = e.cells_meeting_h4 > b.cells_meeting_h4
            || (e.cells_meeting_h4 == b.cells_meeting_h4 && e.mean_c1_share.unwrap_or(0.0) > b.mean_c1_share.unwrap_or(0.0));
        if better {
            best = i;
        }
    }
    let best_pair = entries.get(best).map_or((0.0, 0.0), |e| (e.ood_band, e.tolerance_multiplier));
    if let Some(e) = entries.get_mut(best) {
        e.best = true;
    }
    Ok(CalibrationReport { entries, primary: (0.02, 3.0), best: best_pair })
}

/// The 3 x 3 grid of OOD band widths and tolerance multipliers.
pub fn nine_grid() -> Vec<(f64, f64)> {
    OOD_BAND_GRID.iter().flat_map(|&b| TOLERANCE_MULTIPLIER_GRID.iter().map(move |&t| (b, t))).collect()
}

/// Cutoffs 0.05, 0.10, ..., 0.50.
pub fn dense_cutoffs() -> Vec<f64> {
    (1..=10).map(|i| i as f64 * 0.05).collect()
}

/// For each cutoff, how many cells with defined shares have
/// `suspect_share <= cutoff`.
pub fn h4_cutoff_sweep(cells: &[CellResult], cutoffs: &[f64]) -> Result<Vec<SweepRow>> {
    if cutoffs.is_empty() {
        return Err(HarnessError::InvalidArgument("no cutoffs".into()));
    }
    let shares: Vec<f64> = cells.iter().filter_map(|c| c.suspect_share).collect();
    let total = shares.len();
    Ok(cutoffs
        .iter()
        .map(|&cutoff| {
            let count = shares.iter().filter(|&&s| s <= cutoff).count();
            SweepRow { cutoff, count, total, ratio: if total == 0 { 0.0 } else { count as f64 / total as f64 } }
        })
        .collect())
}

/// Annotation, calibration and the cutoff sweep in one report.
pub fn lrca_report(results: &CampaignResults, cfg: &LrcaConfig) -> Result<(CampaignResults, LrcaReport)> {
    let (annotated, labels) = annotate(results, cfg)?;
    let mut sets: BTreeMap<Vec<RootCause>, usize> = BTreeMap::new();
    for l in &labels {
        *sets.entry(l.annotation.co_occurring.clone()).or_default() += 1;
    }
    let cells = annotated
        .cells
        .iter()
        .map(|c| CellShares {
            put: c.put,
            mp: c.mp.to_string(),
            killed: c.killed_count,
            c1_share: c.c1_share,
            suspect_share: c.suspect_share,
        })
        .collect();
    let report = LrcaReport {
        config: cfg.clone(),
        cells,
        labels,
        co_occurrence: sets.into_iter().map(|(causes, count)| CoOccurrence { causes, count }).collect(),
        mean_suspect_share: mean_suspect_share(&annotated.cells),
        calibration: calibrate(results, cfg, &nine_grid())?,
        h4_sweep: h4_cutoff_sweep(&annotated.cells, &dense_cutoffs())?,
    };
    Ok((annotated, report))
}

#[cfg(test)]
mod tests;
