//! The statistics report over an annotated campaign and the four
//! hypothesis verdicts.

use super::effect::{effect_size, odds_ratios, EffectSizeReport, Magnitude, OddsRatios, ROMANO_MEDIUM};
use super::inference::{
    bh_fdr, bonferroni, coefficient_of_variation, friedman, sign_test, spearman_kendall_seeded, Correlation,
    FriedmanResult, SignTest,
};
use crate::adequacy::{CampaignResults, CellResult, MutantState};
use crate::error::{HarnessError, Result};
use crate::kernels::{PutClass, PutId};
use crate::lrca::H4_THRESHOLD;
use crate::mr::MetaPattern;
use crate::mutation::OperatorClass;
use crate::rng::{derive, tag};
use crate::sentinel;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

pub const FDR_ALPHA: f64 = 0.05;
pub const H1_MIN_MUTANTS: usize = 5;
pub const H1_MIN_PUTS: usize = 9;
pub const H1_MIN_OPERATORS: usize = 4;
pub const H2_MIN_ODDS_RATIO: f64 = 3.0;
pub const H2_MIN_DELTA: f64 = 0.474;
pub const H3_MAX_CV: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassSummary {
    pub class: PutClass,
    #[serde(with = "sentinel::undefined")]
    pub mean_sms: Option<f64>,
    #[serde(with = "sentinel::undefined")]
    pub aligned_mean: Option<f64>,
    #[serde(with = "sentinel::undefined")]
    pub cross_mean: Option<f64>,
    /// Aligned mean minus cross mean.
    #[serde(with = "sentinel::undefined")]
    pub delta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassFriedman {
    pub class: PutClass,
    pub result: Option<FriedmanResult>,
    #[serde(with = "sentinel::undefined")]
    pub p_bonferroni: Option<f64>,
    pub bh_rejected: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PutSummary {
    pub put: PutId,
    #[serde(with = "sentinel::undefined")]
    pub mean_sms: Option<f64>,
    pub pattern_coverage: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsSummary {
    pub aligned_sms: Vec<f64>,
    pub cross_sms: Vec<f64>,
    /// Cells left out because every mutant in them is equivalent.
    pub undefined_cells: usize,
    pub effect: EffectSizeReport,
    /// Set when the point estimate sits just under the medium threshold,
    /// where inclusive and exclusive readings of the labels are easy to mix up.
    pub romano_note: Option<String>,
    pub odds: OddsRatios,
    pub classes: Vec<ClassSummary>,
    pub sign_test: Option<SignTest>,
    #[serde(with = "sentinel::undefined")]
    pub cv: Option<f64>,
    pub friedman: Option<FriedmanResult>,
    pub per_class_friedman: Vec<ClassFriedman>,
    pub puts: Vec<PutSummary>,
    pub coverage_correlation: Option<Correlation>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Met,
    NotMet,
    Partial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorSupport {
    pub operator: OperatorClass,
    /// PUTs on which the operator has at least five non-equivalent mutants.
    pub qualifying_puts: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct H1 {
    pub verdict: Verdict,
    pub operators: Vec<OperatorSupport>,
    pub qualifying_operators: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct H2 {
    pub verdict: Verdict,
    #[serde(with = "sentinel::extended")]
    pub nonzero_odds_ratio: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct H3 {
    pub verdict: Verdict,
    pub positives: usize,
    pub total: usize,
    pub p: f64,
    #[serde(with = "sentinel::undefined")]
    pub cv: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct H4 {
    pub verdict: Verdict,
    pub mean_suspect_share: f64,
    pub cells_meeting: usize,
    pub cells_with_shares: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisVerdicts {
    pub h1: H1,
    pub h2: H2,
    pub h3: H3,
    pub h4: H4,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsReport {
    pub seed: u64,
    pub summary: StatsSummary,
    pub hypotheses: HypothesisVerdicts,
}

fn mean(xs: &[f64]) -> Option<f64> {
    (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}

fn cell<'a>(cells: &'a [CellResult], put: PutId, mp: MetaPattern) -> Option<&'a CellResult> {
    cells.iter().find(|c| c.put == put && c.mp == mp)
}

/// Checks that the 60-cell projection and its tensor are all present and
/// that every cell with kills carries shares.
fn require_complete(campaign: &CampaignResults) -> Result<()> {
    for put in PutId::ALL {
        for mp in MetaPattern::CAMPAIGN {
            let c = cell(&campaign.cells, put, mp).ok_or_else(|| HarnessError::IncompleteInput(format!("no cell {put} {mp}")))?;
            if c.killed_count > 0 && c.suspect_share.is_none() {
                return Err(HarnessError::IncompleteInput(format!("cell {put} {mp} is not annotated")));
            }
            for op in OperatorClass::ALL {
                if !campaign.tensor.iter().any(|t| t.put == put && t.mp == mp && t.operator == Some(op)) {
                    return Err(HarnessError::IncompleteInput(format!("no tensor cell {put} {mp} {op}")));
                }
            }
        }
    }
    Ok(())
}

/// Every statistic over the 60-cell projection of an annotated campaign.
pub fn summarize(campaign: &CampaignResults) -> Result<StatsSummary> {
    require_complete(campaign)?;
    let seed = campaign.config.seed;
    let cells = &campaign.cells;
    let defined = |c: &&CellResult| c.sms.is_some();
    let aligned: Vec<f64> = cells.iter().filter(|c| c.aligned).filter(defined).filter_map(|c| c.sms).collect();
    let cross: Vec<f64> = cells.iter().filter(|c| !c.aligned).filter(defined).filter_map(|c| c.sms).collect();
    let undefined_cells = cells.iter().filter(|c| c.sms.is_none()).count();

    let effect = effect_size(&aligned, &cross, campaign.config.headline_bootstrap_iterations, derive(seed, &[tag("headline")]))?;
    let romano_note = (effect.classification == Magnitude::Small && effect.delta.abs() >= 0.30).then(|| {
        format!(
            "delta {:.3} lies just under the medium threshold {ROMANO_MEDIUM}; labelled small under inclusive thresholds",
            effect.delta
        )
    });
    let odds = odds_ratios(&aligned, &cross)?;

    let classes: Vec<ClassSummary> = PutClass::ALL
        .iter()
        .map(|&class| {
            let mine: Vec<&CellResult> = cells.iter().filter(|c| c.put.class() == class).collect();
            let pick = |f: &dyn Fn(&CellResult) -> bool| mine.iter().filter(|c| f(c)).filter_map(|c| c.sms).collect::<Vec<_>>();
            let all = pick(&|_| true);
            let a = mean(&pick(&|c| c.aligned));
            let x = mean(&pick(&|c| !c.aligned));
            ClassSummary {
                class,
                mean_sms: mean(&all),
                aligned_mean: a,
                cross_mean: x,
                delta: a.zip(x).map(|(a, x)| a - x),
            }
        })
        .collect();
    let deltas: Vec<f64> = classes.iter().filter_map(|c| c.delta).collect();
    let sign = sign_test(&deltas).ok();
    let cv = coefficient_of_variation(&deltas).ok();

    // Friedman over PUT rows with all five SMS values defined
    let row = |put: PutId| -> Option<Vec<f64>> { MetaPattern::CAMPAIGN.iter().map(|&mp| cell(cells, put, mp)?.sms).collect() };
    let rows: Vec<Vec<f64>> = PutId::ALL.iter().filter_map(|&p| row(p)).collect();
    let friedman_all = friedman(&rows).ok();
    let per_class: Vec<Option<FriedmanResult>> = PutClass::ALL
        .iter()
        .map(|c| friedman(&c.members().iter().filter_map(|&p| row(p)).collect::<Vec<_>>()).ok())
        .collect();
    let raw: Vec<f64> = per_class.iter().map(|r| r.as_ref().map_or(1.0, |r| r.p)).collect();
    let adjusted = bonferroni(&raw, PutClass::ALL.len())?;
    let rejected = bh_fdr(&raw, FDR_ALPHA)?;
    let per_class_friedman = PutClass::ALL
        .iter()
        .zip(per_class)
        .enumerate()
        .map(|(i, (&class, result))| ClassFriedman {
            class,
            p_bonferroni: result.as_ref().map(|_| adjusted[i]),
            bh_rejected: result.is_some() && rejected[i],
            result,
        })
        .collect();

    let puts: Vec<PutSummary> = PutId::ALL
        .iter()
        .map(|&put| PutSummary {
            put,
            mean_sms: mean(&MetaPattern::CAMPAIGN.iter().filter_map(|&mp| cell(cells, put, mp).and_then(|c| c.sms)).collect::<Vec<_>>()),
            pattern_coverage: campaign.pattern_coverage.iter().find(|p| p.put == put).map_or(0.0, |p| p.coverage),
        })
        .collect();
    let (xs, ys): (Vec<f64>, Vec<f64>) = puts.iter().filter_map(|p| p.mean_sms.map(|m| (m, p.pattern_coverage))).unzip();
    let coverage_correlation = spearman_kendall_seeded(&xs, &ys, derive(seed, &[tag("correlation")])).ok();

    Ok(StatsSummary {
        aligned_sms: aligned,
        cross_sms: cross,
        undefined_cells,
        effect,
        romano_note,
        odds,
        classes,
        sign_test: sign,
        cv,
        friedman: friedman_all,
        per_class_friedman,
        puts,
        coverage_correlation,
    })
}

/// H1 to H4 from an annotated campaign and its statistics.
pub fn evaluate_hypotheses(campaign: &CampaignResults, stats: &StatsSummary) -> Result<HypothesisVerdicts> {
    require_complete(campaign)?;

    // a mutant counts as non-equivalent when some pattern's cell does not
    // find it equivalent
    let operators: Vec<OperatorSupport> = OperatorClass::ALL
        .iter()
        .map(|&op| {
            let qualifying_puts = PutId::ALL
                .iter()
                .filter(|&&put| {
                    let live: BTreeSet<&str> = campaign
                        .tensor
                        .iter()
                        .filter(|t| t.put == put && t.operator == Some(op))
                        .flat_map(|t| t.per_mutant.iter())
                        .filter(|m| m.state != MutantState::Equivalent)
                        .map(|m| m.mutant_id.as_str())
                        .collect();
                    live.len() >= H1_MIN_MUTANTS
                })
                .count();
            OperatorSupport { operator: op, qualifying_puts }
        })
        .collect();
    let qualifying_operators = operators.iter().filter(|o| o.qualifying_puts >= H1_MIN_PUTS).count();
    let h1 = H1 {
        verdict: if qualifying_operators >= H1_MIN_OPERATORS { Verdict::Met } else { Verdict::NotMet },
        operators,
        qualifying_operators,
    };

    let or = stats.odds.nonzero_odds_ratio;
    let h2 = H2 {
        verdict: if or >= H2_MIN_ODDS_RATIO && stats.effect.delta >= H2_MIN_DELTA { Verdict::Met } else { Verdict::NotMet },
        nonzero_odds_ratio: or,
        delta: stats.effect.delta,
    };

    let sign = stats
        .sign_test
        .ok_or_else(|| HarnessError::IncompleteInput("no class has both aligned and cross SMS".into()))?;
    let all_positive = sign.positives == PutClass::ALL.len() && sign.total == PutClass::ALL.len();
    let cv_ok = stats.cv.is_some_and(|cv| cv < H3_MAX_CV);
    let h3 = H3 {
        verdict: if all_positive && cv_ok {
            Verdict::Met
        } else if all_positive || sign.positives == PutClass::ALL.len() - 1 {
            Verdict::Partial
        } else {
            Verdict::NotMet
        },
        positives: sign.positives,
        total: sign.total,
        p: sign.p,
        cv: stats.cv,
    };

    let shares: Vec<f64> = campaign.cells.iter().filter_map(|c| c.suspect_share).collect();
    let mean_suspect_share =
        mean(&shares).ok_or_else(|| HarnessError::IncompleteInput("no cell has kills, suspect share undefined".into()))?;
    let h4 = H4 {
        verdict: if mean_suspect_share <= H4_THRESHOLD { Verdict::Met } else { Verdict::NotMet },
        mean_suspect_share,
        cells_meeting: shares.iter().filter(|&&s| s <= H4_THRESHOLD).count(),
        cells_with_shares: shares.len(),
    };
    Ok(HypothesisVerdicts { h1, h2, h3, h4 })
}

/// Statistics and verdicts in one report.
pub fn compute_stats(campaign: &CampaignResults) -> Result<StatsReport> {
    let summary = summarize(campaign)?;
    let hypotheses = evaluate_hypotheses(campaign, &summary)?;
    Ok(StatsReport { seed: campaign.config.seed, summary, hypotheses })
}


/// Distribution of SMS over the cells where it is defined.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmsSummary {
    pub cells: usize,
    pub defined: usize,
    #[serde(with = "sentinel::undefined")]
    pub mean: Option<f64>,
    #[serde(with = "sentinel::undefined")]
    pub median: Option<f64>,
    /// Population standard deviation.
    #[serde(with = "sentinel::undefined")]
    pub std: Option<f64>,
    pub zero_cells: usize,
}

pub fn sms_summary(cells: &[CellResult]) -> SmsSummary {
    let v: Vec<f64> = cells.iter().filter_map(|c| c.sms).collect();
    let m = mean(&v);
    SmsSummary {
        cells: cells.len(),
        defined: v.len(),
        mean: m,
        median: (!v.is_empty()).then(|| super::effect::median(&v)),
        std: m.map(|m| (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / v.len() as f64).sqrt()),
        zero_cells: v.iter().filter(|&&x| x == 0.0).count(),
    }
}
