use thiserror::Error;

/// Every failure the harness can report. Variants map one-to-one onto the
/// error names used throughout the module contracts.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum HarnessError {
    #[error("unknown PUT identifier `{0}`")]
    UnknownPut(String),
    #[error("input {x} outside domain [{lo}, {hi}]")]
    DomainViolation { x: f64, lo: f64, hi: f64 },
    #[error("kernel produced a non-finite output")]
    NonFiniteOutput,
    #[error("PUT {0} has no trajectory output")]
    NotTrajectoryCapable(String),
    #[error("trajectory needs at least 2 steps")]
    TooFewSteps,
    #[error("syntactic mutants exist only for deterministic A-class PUTs, not {0}")]
    NotDeterministicClass(String),
    #[error("MP_eq is only valid in degeneration mode")]
    UnknownMetaPattern,
    #[error("wilcoxon needs at least one difference")]
    DegenerateSample,
    #[error("convergence order needs strictly positive errors")]
    NonPositiveError,
    #[error("convergence order needs >= 3 steps refined by a constant factor")]
    IrregularRefinement,
    #[error("empty sequence")]
    EmptySequence,
    #[error("all instantiated mutants are equivalent; SMS is undefined")]
    AllEquivalent,
    #[error("cell has no killed mutants; shares are undefined")]
    NoKills,
    #[error("missing LRCA evidence: {0}")]
    MissingEvidence(String),
    #[error("empty sample")]
    EmptySample,
    #[error("mean is zero; coefficient of variation undefined")]
    ZeroMean,
    #[error("matrix needs n >= 2 rows and k >= 2 columns")]
    DegenerateMatrix,
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("target delta {target} is unreachable from delta {observed}")]
    UnreachableTarget { target: f64, observed: f64 },
    #[error("incomplete input: {0}")]
    IncompleteInput(String),
    #[error("degenerate-limit configuration incomplete: {0}")]
    ConfigIncomplete(String),
    #[error("degeneration mismatch on {put}: SMS {sms} vs MS {ms}")]
    MismatchDetected { put: String, sms: f64, ms: f64 },
    #[error("LRCA trivialisation violated: {0}")]
    TrivialisationViolated(String),
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, HarnessError>;
