//! Error types.

use thiserror::Error;

/// Malformed textual or JSON input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    /// Bracket notation could not be parsed.
    #[error("syntax error at byte {offset}: {message}")]
    Syntax {
        /// Byte offset into the input.
        offset: usize,
        /// What went wrong.
        message: String,
    },
    /// The gap symbol `-` was used as a node label.
    #[error("the label '-' is reserved for the gap symbol{}", .offset.map(|o| format!(" (byte {o})")).unwrap_or_default())]
    ReservedLabel {
        /// Byte offset into the input, when known.
        offset: Option<usize>,
    },
    /// A node had an empty label.
    #[error("node labels must not be empty")]
    EmptyLabel,
    /// A single tree was expected.
    #[error("expected exactly one tree, found {roots}")]
    NotATree {
        /// Number of roots found.
        roots: usize,
    },
    /// An edit script or mapping line could not be parsed.
    #[error("line {line}: {message}")]
    Line {
        /// 1-based line number.
        line: usize,
        /// What went wrong.
        message: String,
    },
    /// Invalid JSON input.
    #[error("invalid JSON: {0}")]
    Json(String),
}

/// Invalid cost function definition or query.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CostError {
    /// The cost of mapping a gap onto a gap is undefined.
    #[error("the cost of gap against gap is undefined")]
    GapToGap,
    /// A cost was NaN or infinite.
    #[error("cost for ({from}, {to}) is not finite: {value}")]
    NotFinite {
        /// Source symbol.
        from: String,
        /// Target symbol.
        to: String,
        /// The offending value.
        value: f64,
    },
    /// The cost file could not be parsed.
    #[error("invalid cost file: {0}")]
    Json(String),
    /// The cost function violates a property the dynamic program relies on.
    #[error("cost function is not admissible: {0}")]
    NotAdmissible(String),
}

/// A precondition of an operation was violated.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ContractError {
    /// A node index was outside the valid range.
    #[error("index {index} out of range 1..={len}")]
    IndexOutOfRange {
        /// The offending index.
        index: usize,
        /// Number of nodes.
        len: usize,
    },
    /// A mapping violated one of the structural constraints.
    #[error("invalid mapping: {0}")]
    InvalidMapping(String),
    /// A sub-forest query did not describe a valid slab.
    #[error("invalid sub-forest query: {0}")]
    InvalidQuery(String),
    /// A tree used the reserved gap label.
    #[error("the label '-' is reserved for the gap symbol")]
    ReservedLabel,
}

/// Any error raised by this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// See [`ParseError`].
    #[error(transparent)]
    Parse(#[from] ParseError),
    /// See [`CostError`].
    #[error(transparent)]
    Cost(#[from] CostError),
    /// See [`ContractError`].
    #[error(transparent)]
    Contract(#[from] ContractError),
}
