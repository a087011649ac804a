//! Error type shared by every module of the crate.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Failures reported by the geometric operations.
///
/// Variants fall into three groups: malformed input (dimension mismatch,
/// empty input, out-of-range parameters), configurations outside the
/// algorithmic scope (unsupported dimension, degenerate arrangements), and
/// alarms that signal a broken invariant which the underlying theorems say
/// cannot happen.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("pairwise distance {distance} exceeds 2, arc-distance undefined")]
    DistanceTooLarge { distance: f64 },

    #[error("operation unsupported in dimension {dim}")]
    Unsupported { dim: usize },

    #[error("generators do not lie in an open hemisphere")]
    NoHemisphere,

    #[error("point is not in the spindle convex hull")]
    NotInHull,

    #[error("set has circumradius {crr} > 1")]
    OutOfScope { crr: f64 },

    #[error("input size {size} exceeds the cap of {cap}")]
    SizeCapExceeded { size: usize, cap: usize },

    #[error("ball does not support the hull: {0}")]
    NotSupporting(String),

    #[error("sets cannot be separated: {0}")]
    NotSeparable(String),

    #[error("bad parameters: {0}")]
    BadParameters(String),

    #[error("degenerate configuration: {reason} (spheres {spheres:?})")]
    DegenerateConfiguration { reason: String, spheres: Vec<usize> },

    #[error("face {face} is not co-circular")]
    NotCoCircular { face: usize },

    #[error("hypothesis not met by sub-family {witness:?}")]
    HypothesisNotMet { witness: Vec<usize> },

    #[error("construction failed verification: {0}")]
    ConstructionError(String),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("not a contraction: pair ({i}, {j}) grows from {before} to {after}")]
    InvalidPair { i: usize, j: usize, before: f64, after: f64 },

    #[error("point is not on the boundary (distance {defect})")]
    NotOnBoundary { defect: f64 },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("theorem violation detected, implementation fault: {0}")]
    TheoremViolation(String),
}
