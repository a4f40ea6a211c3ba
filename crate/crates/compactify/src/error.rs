//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by construction and by the algebraic operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An index fell outside the ground set it was used against.
    #[error("index {index} out of range: {context}")]
    IndexOutOfRange { index: usize, context: String },

    /// A partition or map failed its structural invariants at construction.
    #[error("invalid {what}: {reason}")]
    InvalidConstruction { what: &'static str, reason: String },

    /// Two partitions (or a partition and a map side) live on different ground sets.
    #[error("ground mismatch: {0}")]
    GroundMismatch(String),

    /// The relating construction requires the codomain partition to refine the
    /// pushforward of the domain partition.
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    /// A chain failed its invariants (disjointness, nonempty levels, totality).
    #[error("invalid chain: {0}")]
    InvalidChain(String),

    /// An atomization does not match the chain it is paired with.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// A well-order was requested on an empty set.
    #[error("empty atom has no well-order")]
    EmptyAtom,

    /// A lift was attempted along a map that is not onto the base atom.
    #[error("map is not onto the base atom: {0}")]
    NotOnto(String),

    /// A chain compactification was attempted with an invalid atomization.
    #[error("atomization invalid: {0}")]
    AtomizationInvalid(String),

    /// A ray presentation failed its invariants.
    #[error("invalid ray presentation: {0}")]
    InvalidPresentation(String),

    /// The shrinking condition does not hold, so no decomposition exists.
    #[error("shrinking condition fails: {0}")]
    ConditionFails(String),

    /// A first-kind operation was applied to a class that is not first kind.
    #[error("class is not of the first kind: {0}")]
    NotFirstKind(String),

    /// A continuity certificate could not be established for a branch.
    #[error("certificate failure at branch {branch}: {reason}")]
    CertificateFailure { branch: usize, reason: String },

    /// An instance file could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
