//! Meta-patterns, the 60-cell density matrix and the metamorphic-relation
//! catalogue.

mod catalog;

pub use catalog::{mr_catalog, mrs_for};
pub(crate) use catalog::STEPS as TRAJECTORY_STEPS;

use crate::error::{HarnessError, Result};
use crate::kernels::{Domain, PutId};
use crate::rng::{stream, tag, Rng};
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MetaPattern {
    /// Conservation: an exact identity between source and follow-up outputs.
    MP1,
    /// Monotonicity.
    MP2,
    /// Convergence under refinement.
    MP3,
    /// Trajectory similarity.
    MP4,
    /// Partial order between fidelity levels.
    MP5,
    /// Bitwise equality with the original; degeneration mode only.
    MPEq,
}

impl MetaPattern {
    /// The five campaign patterns (MP_eq excluded).
    pub const CAMPAIGN: [MetaPattern; 5] =
        [MetaPattern::MP1, MetaPattern::MP2, MetaPattern::MP3, MetaPattern::MP4, MetaPattern::MP5];

    /// Position in [`MetaPattern::CAMPAIGN`]; `None` for MP_eq.
    pub fn index(self) -> Option<usize> {
        MetaPattern::CAMPAIGN.iter().position(|&m| m == self)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            MetaPattern::MP1 => "MP1",
            MetaPattern::MP2 => "MP2",
            MetaPattern::MP3 => "MP3",
            MetaPattern::MP4 => "MP4",
            MetaPattern::MP5 => "MP5",
            MetaPattern::MPEq => "MPeq",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            MetaPattern::MP1 => "Conservation",
            MetaPattern::MP2 => "Monotonicity",
            MetaPattern::MP3 => "Convergence",
            MetaPattern::MP4 => "Trajectory",
            MetaPattern::MP5 => "Partial-order",
            MetaPattern::MPEq => "Equality",
        }
    }
}

impl fmt::Display for MetaPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CellDensity {
    Substantial,
    Moderate,
    Vacant,
}

impl CellDensity {
    /// Fewest MRs a cell of this density carries.
    pub fn min_mrs(self) -> usize {
        match self {
            CellDensity::Substantial => 2,
            CellDensity::Moderate => 1,
            CellDensity::Vacant => 0,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            CellDensity::Substantial => "••",
            CellDensity::Moderate => "•",
            CellDensity::Vacant => "○",
        }
    }
}

const S: CellDensity = CellDensity::Substantial;
const M: CellDensity = CellDensity::Moderate;
const V: CellDensity = CellDensity::Vacant;

/// Rows A1..D3, columns MP1..MP5, transcribed from the published density matrix.
const DENSITY: [[CellDensity; 5]; 12] = [
    [S, M, S, S, V],
    [S, V, M, M, S],
    [S, M, S, S, V],
    [S, M, V, V, M],
    [M, S, S, S, M],
    [S, V, S, M, V],
    [M, S, S, M, S],
    [S, M, S, M, S],
    [M, S, S, S, S],
    [S, S, M, M, S],
    [M, S, M, V, S],
    [S, S, M, V, S],
];

pub fn density(put: PutId, mp: MetaPattern) -> Result<CellDensity> {
    let k = mp.index().ok_or(HarnessError::UnknownMetaPattern)?;
    Ok(DENSITY[put.index()][k])
}

/// The pattern a PUT's aligned cell is measured on.
pub fn primary_mp(put: PutId) -> MetaPattern {
    match put {
        PutId::A1 | PutId::A2 | PutId::A3 | PutId::B1 | PutId::B3 => MetaPattern::MP1,
        PutId::B2 => MetaPattern::MP2,
        PutId::C1 | PutId::C2 | PutId::C3 => MetaPattern::MP5,
        PutId::D1 | PutId::D2 | PutId::D3 => MetaPattern::MP2,
    }
}

/// `x -> scale * x + shift`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Affine {
    pub scale: f64,
    pub shift: f64,
}

impl Affine {
    pub const IDENTITY: Affine = Affine { scale: 1.0, shift: 0.0 };

    pub const fn new(scale: f64, shift: f64) -> Self {
        Affine { scale, shift }
    }

    pub fn apply(&self, x: f64) -> f64 {
        self.scale * x + self.shift
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Link {
    Identity,
    Logit,
}

impl Link {
    pub fn apply(self, y: f64) -> f64 {
        match self {
            Link::Identity => y,
            Link::Logit => (y / (1.0 - y)).ln(),
        }
    }
}

/// Error reference for convergence relations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ConvergenceReference {
    /// Distance to the same program at a much finer level.
    Level(u32),
    /// Spread of the output across this many seeds (stochastic kernels).
    SeedSpread(usize),
}

/// Known ground truth a fidelity relation can measure against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Truth {
    Affine(Affine),
    /// `t + 0.3 sin 2t`, the GP training target.
    GprTarget,
    /// `|t|^3`, the chaos-expansion target.
    AbsCube,
    Sine,
    /// Standard normal CDF.
    NormalCdf,
}

impl Truth {
    pub fn eval(self, x: f64) -> f64 {
        match self {
            Truth::Affine(a) => a.apply(x),
            Truth::GprTarget => crate::kernels::gpr_target(x),
            Truth::AbsCube => crate::kernels::pce_target(x),
            Truth::Sine => x.sin(),
            Truth::NormalCdf => crate::numeric::phi(x),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FidelityReference {
    Level(u32),
    Truth(Truth),
    /// The same program at this level, fitted under an independent seed:
    /// shares the systematic error of the compared levels, so only the
    /// variance part of the error is measured.
    Independent(u32),
}

/// How seeds are assigned when a relation evaluates several sources.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Seeding {
    /// One fitted model, shared by all sources (common random numbers).
    Common,
    /// Each source gets its own seed derived from the verdict seed.
    PerSource,
}

/// The executable part of an MR: which follow-ups to run and how outputs
/// must relate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Relation {
    /// `f(input(x)) == output(f(x))`.
    Symmetry { input: Affine, output: Affine },
    /// Elementwise version of `Symmetry` on trajectories.
    TrajectorySymmetry { input: Affine, output: Affine, steps: usize },
    /// `L(f(x)) + L(f(x + spread)) == 2 L(f(x + spread / 2))`.
    MidpointAffine { spread: f64, link: Link },
    /// Gauss-Legendre mean of `f` over the domain equals `target`.
    Quadrature { nodes: usize, target: f64 },
    /// Consecutive trajectory ratios are constant (single-mode decay).
    DecayRatio { steps: usize },
    /// `f(x) <= f(x + delta)` (or `>=`), tested with a signed-rank test.
    Monotone { delta: f64, increasing: bool },
    /// Errors at `levels` shrink at `expected_order` in `h = 2^-level`.
    Convergence { levels: [u32; 3], reference: ConvergenceReference, expected_order: f64 },
    /// Trajectories from `x` and `x + delta` stay within the DTW threshold.
    TrajectoryStability { delta: f64, steps: usize },
    /// `traj(input(x))` stays DTW-close to `output(traj(x))`.
    TrajectoryEquivariance { input: Affine, output: Affine, steps: usize },
    /// The finer level is never less accurate than the coarser one.
    FidelityOrder { coarse: u32, fine: u32, reference: FidelityReference },
    /// Bitwise output equality with the original program.
    Equality,
}

impl Relation {
    /// Follow-up inputs for a source input.
    pub fn follow_ups(&self, x: f64) -> Vec<f64> {
        match *self {
            Relation::Symmetry { input, .. }
            | Relation::TrajectorySymmetry { input, .. }
            | Relation::TrajectoryEquivariance { input, .. } => vec![input.apply(x)],
            Relation::MidpointAffine { spread, .. } => vec![x + 0.5 * spread, x + spread],
            Relation::Monotone { delta, .. } | Relation::TrajectoryStability { delta, .. } => vec![x + delta],
            _ => Vec::new(),
        }
    }

    pub fn uses_dtw(&self) -> bool {
        matches!(self, Relation::TrajectoryStability { .. } | Relation::TrajectoryEquivariance { .. })
    }

    pub fn uses_wilcoxon(&self) -> bool {
        matches!(self, Relation::Monotone { .. } | Relation::FidelityOrder { .. })
    }
}

/// Source inputs: `count` uniform draws from `[lo, hi]`, fixed by `salt`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SourceSpec {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    pub salt: u64,
}

impl SourceSpec {
    pub fn inputs(&self) -> Vec<f64> {
        self.inputs_within(Domain::new(self.lo, self.hi)).unwrap_or_default()
    }

    /// The same number of sources, drawn from the part of the range inside
    /// `region`. `None` when the two do not overlap.
    pub fn inputs_within(&self, region: Domain) -> Option<Vec<f64>> {
        let lo = self.lo.max(region.lo);
        let hi = self.hi.min(region.hi);
        if lo > hi {
            return None;
        }
        let mut rng = stream(self.salt, &[tag("sources")]);
        Some((0..self.count).map(|_| lo + (hi - lo) * rng.random::<f64>()).collect())
    }
}

/// One metamorphic relation attached to a (PUT, pattern) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MrInstance {
    pub mr_id: String,
    pub put: PutId,
    pub mp: MetaPattern,
    pub description: String,
    pub relation: Relation,
    pub sources: SourceSpec,
    pub seeding: Seeding,
    /// Absolute tolerance (MP1), significance level (MP2, MP5), order
    /// tolerance (MP3) or DTW threshold (MP4).
    pub tolerance: f64,
}

impl MrInstance {
    pub fn source_inputs(&self) -> Vec<f64> {
        self.sources.inputs()
    }

    /// Verification method name, as reported in manifests and LRCA evidence.
    pub fn method(&self) -> &'static str {
        match self.relation {
            Relation::Symmetry { .. }
            | Relation::TrajectorySymmetry { .. }
            | Relation::MidpointAffine { .. }
            | Relation::Quadrature { .. }
            | Relation::DecayRatio { .. } => "tolerance",
            Relation::Monotone { .. } | Relation::FidelityOrder { .. } => "wilcoxon",
            Relation::Convergence { .. } => "convergence-order",
            Relation::TrajectoryStability { .. } | Relation::TrajectoryEquivariance { .. } => "dtw",
            Relation::Equality => "equality",
        }
    }

    /// The equality relation used by the degeneration check.
    pub fn equality(put: PutId, sources: SourceSpec) -> MrInstance {
        MrInstance {
            mr_id: format!("{put}-MPeq"),
            put,
            mp: MetaPattern::MPEq,
            description: "output bitwise equal to the original at every source".into(),
            relation: Relation::Equality,
            sources,
            seeding: Seeding::Common,
            tolerance: 0.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn density_fixtures() {
        assert_eq!(density(PutId::B2, MetaPattern::MP3).unwrap(), CellDensity::Substantial);
        assert_eq!(density(PutId::B3, MetaPattern::MP5).unwrap(), CellDensity::Vacant);
        assert_eq!(density(PutId::A2, MetaPattern::MP2).unwrap(), CellDensity::Vacant);
        assert_eq!(density(PutId::D3, MetaPattern::MP4).unwrap(), CellDensity::Vacant);
        assert_eq!(density(PutId::A1, MetaPattern::MPEq), Err(HarnessError::UnknownMetaPattern));
    }

    #[test]
    fn density_tallies() {
        let mut counts = [0usize; 3];
        for put in PutId::ALL {
            for mp in MetaPattern::CAMPAIGN {
                counts[match density(put, mp).unwrap() {
                    CellDensity::Substantial => 0,
                    CellDensity::Moderate => 1,
                    CellDensity::Vacant => 2,
                }] += 1;
            }
        }
        // row tallies; the matrix legend's 30/24/6 disagrees with its own rows
        assert_eq!(counts, [32, 19, 9]);
    }

    #[test]
    fn primary_patterns() {
        assert_eq!(primary_mp(PutId::C2), MetaPattern::MP5);
        assert_eq!(primary_mp(PutId::D1), MetaPattern::MP2);
        assert_eq!(primary_mp(PutId::A1), MetaPattern::MP1);
        for put in PutId::ALL {
            assert_ne!(density(put, primary_mp(put)).unwrap(), CellDensity::Vacant, "{put}");
        }
    }

    #[test]
    fn sources_are_fixed_and_in_range() {
        let s = SourceSpec { lo: -1.0, hi: 2.0, count: 30, salt: 9 };
        assert_eq!(s.inputs(), s.inputs());
        assert!(s.inputs().iter().all(|x| (-1.0..=2.0).contains(x)));
        let inner = s.inputs_within(Domain::new(0.0, 1.0)).unwrap();
        assert!(inner.iter().all(|x| (0.0..=1.0).contains(x)));
        assert!(s.inputs_within(Domain::new(5.0, 6.0)).is_none());
    }
}
