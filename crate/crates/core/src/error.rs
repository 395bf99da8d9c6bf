//! Error types shared across the library.

use thiserror::Error;

/// Everything that can go wrong while building or analysing a block datum.
#[derive(Debug, Error)]
pub enum Error {
    /// Division by the zero rational function.
    #[error("division by zero rational function")]
    DivisionByZero,

    /// A group closure exceeded the configured element cap.
    #[error("group closure cap exceeded ({cap} elements); group is infinite or cap too small")]
    GroupCapExceeded { cap: usize },

    /// A group closure produced matrix entries beyond machine integers.
    #[error("group closure overflowed machine integers; the generated group is not finite")]
    GroupOverflow,

    /// A datum file failed structural parsing.
    #[error("datum parse error: {0}")]
    DatumParse(String),

    /// A datum failed semantic validation; every violation is listed.
    #[error("datum validation failed:\n{}", crate::datum::render_violations(.0))]
    Validation(Vec<crate::datum::Violation>),

    /// A sign vector describes an empty region of the arrangement.
    #[error("sign vector is infeasible: no point of E realises it")]
    InfeasibleSignVector,

    /// Representative sampling kept hitting excluded hyperplanes.
    #[error("could not sample a representative avoiding excluded hyperplanes after {tries} tries")]
    SamplingExhausted { tries: usize },

    /// The canonical-basis search ran out of its configured bounds.
    #[error("canonical basis search bound exhausted: {0}")]
    SearchBoundExhausted(String),

    /// A set of roots is not closed under its own reflections.
    #[error("root subset is not closed under its own reflections: {0}")]
    SubsystemNotClosed(String),

    /// An orbit labeling is structurally invalid.
    #[error("invalid orbit labeling: {0}")]
    BadLabeling(String),

    /// Two orbits with equal weight failed to decouple during factorization.
    #[error("inconsistent labeling: orbits {0} and {1} share a weight but are coupled")]
    InconsistentLabeling(String, String),

    /// A diagonal block of the factorization is singular over Q(v).
    #[error("singular block for orbit {0}: matrix is not invertible over Q(v)")]
    SingularBlock(String),

    /// A matrix dimension mismatch or similar structural misuse.
    #[error("shape error: {0}")]
    Shape(String),

    /// A precondition documented on an operation was violated.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// An internal audit found an inconsistency (symmetry failure etc.).
    #[error("audit failure: {0}")]
    Audit(String),

    /// IO error while reading an input file.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    /// JSON (de)serialization error.
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
