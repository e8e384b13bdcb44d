//! Crate-wide error type.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong, from bad field parameters to blown
/// enumeration budgets.
#[derive(Debug, Error)]
pub enum Error {
    /// Mixed elements from two different `FieldSpec`s in one operation.
    #[error("field elements belong to different fields")]
    FieldMismatch,

    /// A raw value does not fit in the field (needs `value < 2^m`).
    #[error("value {value:#x} is not an element of GF(2^{m})")]
    InvalidElement { value: u64, m: u32 },

    /// Modulus has the wrong degree or is reducible.
    #[error("modulus {modulus:#x} is not a valid irreducible polynomial of degree {m}")]
    InvalidModulus { modulus: u64, m: u32 },

    /// No built-in modulus for this extension degree.
    #[error("no built-in modulus for m = {m} (supported: 1..=16); pass one explicitly")]
    NoBuiltinModulus { m: u32 },

    /// Extension degree outside the supported range.
    #[error("extension degree m = {m} out of range (supported: 1..=63)")]
    DegreeOutOfRange { m: u32 },

    /// Division by zero in the field.
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,

    /// Shapes do not line up.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A square matrix turned out to be singular.
    #[error("matrix is singular")]
    Singular,

    /// A parity-check matrix without full row rank.
    #[error("parity-check matrix does not have full row rank")]
    RankDeficient,

    /// Gabidulin generators must be GF(2)-linearly independent.
    #[error("generators are linearly dependent over GF(2)")]
    DependentGenerators,

    /// Gabidulin codes need n <= m.
    #[error("code length n = {n} exceeds extension degree m = {m}")]
    LengthExceedsDegree { n: usize, m: u32 },

    /// The base field cannot support the requested construction.
    #[error("field too small: {0}")]
    FieldTooSmall(String),

    /// An exhaustive step would exceed the configured budget.
    #[error("enumeration budget exceeded: requires {required} (budget {budget}); raise --budget or WIRESAFE_BUDGET")]
    BudgetExceeded { required: u64, budget: u64 },

    /// Operation needs nonzero codewords / nonempty search space.
    #[error("degenerate code: {0}")]
    DegenerateCode(String),

    /// Networks must be acyclic.
    #[error("graph contains a cycle")]
    CyclicGraph,

    /// Node name not present in the graph.
    #[error("unknown node `{0}`")]
    UnknownNode(String),

    /// Edge id not present in the graph.
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),

    /// Structural problem with a graph description.
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    /// Scheme rate does not match the wiretap strength.
    #[error("rate mismatch: scheme has k = {k} but n - mu = {expected}")]
    RateMismatch { k: usize, expected: usize },

    /// Catch-all for malformed user input.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
