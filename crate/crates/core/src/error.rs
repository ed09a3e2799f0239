use thiserror::Error;

/// Errors raised by the library.
///
/// The CLI maps `Domain` and `Shape` to exit code 1 and the remaining
/// variants to exit code 2.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// The request exceeds what the implementation supports (size limits,
    /// overflow of intermediate quantities).
    #[error("capability error: {0}")]
    Capability(String),
    /// Two independent evaluations of the same quantity disagree.
    #[error("internal consistency error: {what}: residual {residual:e} exceeds tolerance {tolerance:e}")]
    Consistency {
        what: String,
        residual: f64,
        tolerance: f64,
    },
    /// Operands have incompatible shapes.
    #[error("shape mismatch: {0}")]
    Shape(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn require_finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("{name} must be finite, got {v}")))
    }
}
