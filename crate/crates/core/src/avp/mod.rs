//! The verification pipeline: per-pattern verdicts for a program against an
//! MR.

mod convergence;
mod dtw;
mod verify;
mod wilcoxon;

pub use convergence::convergence_order;
pub use dtw::dtw_distance;
pub use verify::{avp_verify, avp_verify_within, equality_verdict};
pub use wilcoxon::{midranks, signed_rank_test, Alternative, WilcoxonResult};

use crate::error::HarnessError;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AvpVerdict {
    pub verdict: Verdict,
    pub statistic: Option<f64>,
    pub p_value: Option<f64>,
    pub detail: String,
}

impl AvpVerdict {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub(crate) fn fail(detail: impl Into<String>) -> Self {
        AvpVerdict { verdict: Verdict::Fail, statistic: None, p_value: None, detail: detail.into() }
    }

    pub(crate) fn threshold(statistic: f64, limit: f64, what: &str) -> Self {
        let ok = statistic <= limit;
        AvpVerdict {
            verdict: if ok { Verdict::Pass } else { Verdict::Fail },
            statistic: Some(statistic),
            p_value: None,
            detail: format!("{what} {statistic:.3e} {} {limit:.3e}", if ok { "<=" } else { ">" }),
        }
    }
}

pub fn check_tolerance_equality(lhs: f64, rhs: f64, eps: f64) -> Verdict {
    if (lhs - rhs).abs() <= eps {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

/// One-sided signed-rank verdict: positive differences are violations, and
/// the relation passes unless they are significant at `alpha`.
pub fn wilcoxon_signed_rank(diffs: &[f64], alpha: f64) -> AvpVerdict {
    if diffs.iter().any(|d| !d.is_finite()) {
        return AvpVerdict::fail("non-finite");
    }
    match signed_rank_test(diffs, Alternative::Greater) {
        Ok(r) => {
            let ok = r.p_value >= alpha;
            AvpVerdict {
                verdict: if ok { Verdict::Pass } else { Verdict::Fail },
                statistic: Some(r.w_plus),
                p_value: Some(r.p_value),
                detail: format!("W+={} n={} p={:.4}{}", r.w_plus, r.n, r.p_value, if r.exact { " exact" } else { "" }),
            }
        }
        Err(HarnessError::DegenerateSample) | Err(_) => AvpVerdict {
            verdict: Verdict::Pass,
            statistic: Some(0.0),
            p_value: Some(1.0),
            detail: "degenerate sample: all differences zero".into(),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerance_equality_fixtures() {
        assert_eq!(check_tolerance_equality(1.0, 1.0, 1e-6), Verdict::Pass);
        assert_eq!(check_tolerance_equality(1.0, 1.0 + 2e-6, 1e-6), Verdict::Fail);
        assert_eq!(check_tolerance_equality(0.0, 5e-7, 1e-6), Verdict::Pass);
    }

    #[test]
    fn wilcoxon_verdicts() {
        let v = wilcoxon_signed_rank(&[0.0; 4], 0.05);
        assert!(v.passed());
        assert_eq!(v.p_value, Some(1.0));
        let v = wilcoxon_signed_rank(&[1.0, 2.0, 3.0, 4.0, 5.0], 0.05);
        assert_eq!(v.p_value, Some(1.0 / 32.0));
        assert!(!v.passed());
        assert!(!wilcoxon_signed_rank(&[1.0, f64::NAN], 0.05).passed());
    }
}
