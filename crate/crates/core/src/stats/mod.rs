//! The statistics suite: effect sizes, tests, power and hypothesis verdicts.
//!
//! Every resampling loop draws iteration `i` from its own keyed stream, so
//! results are bit-reproducible for a seed whatever the thread count.

mod effect;
mod inference;
mod power;
mod report;

pub use crate::avp::midranks;
pub use effect::{
    bootstrap_ci, cliffs_delta, effect_size, odds_ratios, rank_invariance_check, romano_classify, EffectSizeReport,
    Magnitude, OddsRatios, ROMANO_LARGE, ROMANO_MEDIUM, ROMANO_SMALL,
};
pub use inference::{
    bh_fdr, bonferroni, coefficient_of_variation, friedman, sign_test, spearman_kendall, spearman_kendall_seeded,
    Correlation, FriedmanResult, SignTest, EXACT_PERMUTATION_LIMIT, MONTE_CARLO_PERMUTATIONS,
};
pub use power::{
    power_plugin, power_stipulated, PowerMode, PowerReport, PowerRow, CALIBRATION_TOLERANCE, INNER_BOOTSTRAP,
    MIXTURE_SHIFT, PLUGIN_THRESHOLDS,
};
pub use report::{
    compute_stats, evaluate_hypotheses, sms_summary, summarize, ClassFriedman, ClassSummary, HypothesisVerdicts, OperatorSupport,
    PutSummary, SmsSummary, StatsReport, StatsSummary, Verdict, H1, H2, H3, H4,
};
