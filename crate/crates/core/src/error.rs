use thiserror::Error;

/// Errors produced by the reliability computations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter violated its domain (negative rate, alpha outside [0,1], NaN, ...).
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// Structurally invalid input such as an empty grid or table.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A transition name that is not part of the unified model.
    #[error("unknown transition `{0}`")]
    UnknownTransition(String),

    /// A quantity is mathematically undefined for the given inputs.
    #[error("undefined: {0}")]
    Undefined(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

/// Rejects NaN and infinities.
pub(crate) fn finite(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(invalid(name, format!("must be finite, got {value}")))
    }
}

pub(crate) fn non_negative(name: &'static str, value: f64) -> Result<f64> {
    let value = finite(name, value)?;
    if value < 0.0 {
        return Err(invalid(name, format!("must be >= 0, got {value}")));
    }
    Ok(value)
}

pub(crate) fn positive(name: &'static str, value: f64) -> Result<f64> {
    let value = finite(name, value)?;
    if value <= 0.0 {
        return Err(invalid(name, format!("must be > 0, got {value}")));
    }
    Ok(value)
}
