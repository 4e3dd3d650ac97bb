use thiserror::Error;

/// Errors raised by the laboratory. Every variant is a usage error except
/// where noted; the CLI maps them onto exit code 2.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LabError {
    #[error("coordinate index {index} out of range for arity {n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("{name} = {value} is not a valid probability")]
    InvalidProbability { name: &'static str, value: f64 },

    #[error("arity {n} exceeds the exhaustive cap of {cap}")]
    CapExceeded { n: usize, cap: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = LabError> = std::result::Result<T, E>;

pub(crate) fn check_probability(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(LabError::InvalidProbability { name, value })
    }
}

/// Bias parameters must lie strictly inside (0, 1).
pub(crate) fn check_bias(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(LabError::InvalidProbability { name: "p", value: p })
    }
}
