use thiserror::Error;

/// Errors raised by the solvers, certifiers and file readers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Extended arithmetic hit an undefined form (NaN, `∞ · 0`, `-∞`).
    #[error("arithmetic: {0}")]
    Arithmetic(&'static str),

    /// Every candidate point has infinite objective.
    #[error("no candidate point has finite barycentric cost")]
    AllInfinite,

    #[error("distance between points {0} and {1} is infinite")]
    InfiniteDistance(usize, usize),

    /// Exactly one of a source distance and its image distance is infinite.
    #[error("pair ({0}, {1}) is finite in one space and infinite in the other")]
    MixedFiniteness(usize, usize),

    #[error("bad parameters: {0}")]
    BadParams(String),

    #[error("index {index} out of range for a space of {len} points")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("measures live on different spaces")]
    SpaceMismatch,

    /// Supports are joined only through infinite distances.
    #[error("supports are joined only by infinite distances")]
    InfiniteCost,

    #[error("problem too large: {what} = {size} exceeds cap {cap}")]
    TooLarge {
        what: &'static str,
        size: usize,
        cap: usize,
    },

    #[error("linear program is infeasible")]
    Infeasible,

    #[error("linear program is unbounded")]
    Unbounded,

    #[error("simplex iteration limit {0} reached")]
    IterationLimit(usize),

    #[error("solution carries no transport plan")]
    MissingPlan,

    #[error("domain error: {0}")]
    DomainError(String),

    /// The instance entered the pole regime of a distortion coefficient.
    #[error("degenerate domain: {0}")]
    DegenerateDomain(String),

    #[error("bad bracket: {0}")]
    BadBracket(String),

    /// Test functions violate the barycentric duality hypothesis.
    #[error("functions violate the admissibility hypothesis (defect {defect:e})")]
    Inadmissible { defect: f64 },

    #[error("reference measure has total mass {0}, expected 1")]
    NotProbability(f64),

    /// Malformed input file.
    #[error("schema: {0}")]
    Schema(String),
}

pub type Result<T> = std::result::Result<T, Error>;
