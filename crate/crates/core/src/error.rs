//! Shared error type.

/// Errors produced by rule construction, field evaluation, and checks.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument is outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A structurally invalid configuration (dimension mismatch, unknown
    /// catalog label, unsorted grid, ...).
    #[error("configuration error: {0}")]
    Config(String),

    /// A field returned a non-finite value at a quadrature node.
    #[error("field `{label}` evaluated to a non-finite value at {point:?}")]
    NonFiniteField { label: String, point: Vec<f64> },

    /// A check was applied to a field of the wrong classification.
    #[error("misuse: {0}")]
    Misuse(String),

    /// Invariant violation inside the library itself.
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
