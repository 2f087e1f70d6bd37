//! Plain-text and CSV renderings of bundle contents.

use crate::bundle::Meta;
use crate::commands::{RunSummary, StatsFile};
use sms_core::adequacy::{CampaignResults, CellResult};
use sms_core::degeneration::DegenerationReport;
use sms_core::stats::{HypothesisVerdicts, PowerReport};
use sms_core::{MetaPattern, PutClass, PutId};
use std::fmt::Write;

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "undefined".to_string(), |x| format!("{x:.3}"))
}

fn rows(results: &CampaignResults) -> Vec<PutId> {
    let mut puts: Vec<PutId> = results.cells.iter().map(|c| c.put).collect();
    puts.sort();
    puts.dedup();
    puts
}

fn cell(results: &CampaignResults, put: PutId, mp: MetaPattern) -> Option<&CellResult> {
    results.cells.iter().find(|c| c.put == put && c.mp == mp)
}

/// One row per PUT, one column per pattern; `*` marks the aligned cell and
/// `-` a cell whose SMS is undefined.
pub fn heatmap(results: &CampaignResults) -> String {
    let mut s = String::from("PUT ");
    for mp in MetaPattern::CAMPAIGN {
        let _ = write!(s, "{:>8}", mp.as_str());
    }
    s.push('\n');
    for put in rows(results) {
        let _ = write!(s, "{:<4}", put.as_str());
        for mp in MetaPattern::CAMPAIGN {
            let text = match cell(results, put, mp) {
                Some(c) => {
                    let v = c.sms.map_or_else(|| "-".to_string(), |x| format!("{x:.3}"));
                    if c.aligned { format!("{v}*") } else { v }
                }
                None => "".into(),
            };
            let _ = write!(s, "{text:>8}");
        }
        s.push('\n');
    }
    s
}

pub fn heatmap_csv(results: &CampaignResults) -> String {
    let mut s = String::from("put");
    for mp in MetaPattern::CAMPAIGN {
        let _ = write!(s, ",{}", mp.as_str());
    }
    s.push('\n');
    for put in rows(results) {
        s.push_str(put.as_str());
        for mp in MetaPattern::CAMPAIGN {
            let v = cell(results, put, mp).map_or_else(String::new, |c| c.sms.map_or_else(|| "undefined".into(), |x| x.to_string()));
            let _ = write!(s, ",{v}");
        }
        s.push('\n');
    }
    s
}

/// Mean defined SMS per PUT class, with how many cells contributed.
pub fn class_marginals(results: &CampaignResults) -> Vec<(PutClass, Option<f64>, usize, usize)> {
    PutClass::ALL
        .iter()
        .map(|&class| {
            let cells: Vec<&CellResult> = results.cells.iter().filter(|c| c.put.class() == class).collect();
            let defined: Vec<f64> = cells.iter().filter_map(|c| c.sms).collect();
            let mean = (!defined.is_empty()).then(|| defined.iter().sum::<f64>() / defined.len() as f64);
            (class, mean, defined.len(), cells.len())
        })
        .collect()
}

pub fn verdicts(h: &HypothesisVerdicts) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "H1 {:?}: {} operators qualify", h.h1.verdict, h.h1.qualifying_operators);
    let _ = writeln!(s, "H2 {:?}: odds ratio {:.3}, delta {:.3}", h.h2.verdict, h.h2.nonzero_odds_ratio, h.h2.delta);
    let _ = writeln!(s, "H3 {:?}: {}/{} classes positive, cv {}", h.h3.verdict, h.h3.positives, h.h3.total, opt(h.h3.cv));
    let _ = writeln!(
        s,
        "H4 {:?}: mean suspect share {:.3}, {}/{} cells within threshold",
        h.h4.verdict, h.h4.mean_suspect_share, h.h4.cells_meeting, h.h4.cells_with_shares
    );
    s
}

fn sms_block(stats: &StatsFile) -> String {
    let m = &stats.sms;
    format!(
        "cells {} (defined {}), mean SMS {}, median {}, std {}, zero cells {}\n",
        m.cells,
        m.defined,
        opt(m.mean),
        opt(m.median),
        opt(m.std),
        m.zero_cells
    )
}

pub fn stats_summary(stats: &StatsFile) -> String {
    let mut s = sms_block(stats);
    match (&stats.report, &stats.reason) {
        (Some(r), _) => {
            let e = &r.summary.effect;
            let _ = writeln!(s, "delta {:.3} [{:.3}, {:.3}] {:?}", e.delta, e.ci_low, e.ci_high, e.classification);
            s.push_str(&verdicts(&r.hypotheses));
        }
        (None, reason) => {
            let _ = writeln!(s, "no hypothesis verdicts: {}", reason.as_deref().unwrap_or("unknown"));
        }
    }
    s
}

pub fn report(meta: &Meta, results: &CampaignResults, stats: &StatsFile) -> String {
    let mut s = format!("seed {} k_eq {} replicates {} (tool {})\n\n", meta.seed, meta.k_eq, meta.replicates, meta.tool_version);
    s.push_str("SMS heatmap\n");
    s.push_str(&heatmap(results));
    s.push_str("\nclass marginals\n");
    for (class, mean, defined, total) in class_marginals(results) {
        let _ = writeln!(s, "{class:?}  {}  ({defined}/{total} cells defined)", opt(mean));
    }
    s.push_str("\nsummary\n");
    s.push_str(&stats_summary(stats));
    s.push_str("\npattern coverage\n");
    for c in &results.pattern_coverage {
        let _ = writeln!(s, "{:<4}{:.3}", c.put.as_str(), c.coverage);
    }
    s
}

pub fn run_summary(r: &RunSummary) -> String {
    let aligned = r.results.cells.iter().filter(|c| c.aligned).count();
    let mut s = format!(
        "{} cells ({} aligned, {} cross) in {:.1}s, written to {}\n",
        r.results.cells.len(),
        aligned,
        r.results.cells.len() - aligned,
        r.elapsed_seconds,
        r.out.display()
    );
    s.push_str(&stats_summary(&r.stats));
    s
}

pub fn power(r: &PowerReport) -> String {
    let mut s = format!(
        "{:?} power, {} aligned vs {} cross, observed delta {:.3}, {} simulations\n",
        r.mode, r.n_aligned, r.n_cross, r.observed_delta, r.n_sim
    );
    if let (Some(w), Some(e)) = (r.mixture_weight, r.realized_expected_delta) {
        let _ = writeln!(s, "mixture weight {w:.4}, realised mean delta {e:.4}");
    }
    for row in &r.powers {
        let _ = writeln!(s, "{:<24}{:.3}", row.criterion, row.power);
    }
    s
}

pub fn degeneration(reports: &[DegenerationReport]) -> String {
    let mut s = String::new();
    for r in reports {
        let _ = writeln!(
            s,
            "{}: SMS {} = MS {} (killed {}/{}, equivalent {}), labels {:?}",
            r.put,
            opt(r.sms),
            opt(r.ms),
            r.sms_killed,
            r.mutants,
            r.sms_equivalent,
            r.trivialisation.labels
        );
    }
    s
}
