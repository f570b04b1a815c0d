use thiserror::Error;

/// Errors raised by the simulation and analytics layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter lies outside the domain where the model is defined.
    #[error("parameter `{name}` out of domain: {reason}")]
    Domain { name: &'static str, reason: String },
    /// An index or time window falls outside the available data.
    #[error("out of range: {0}")]
    Range(String),
    /// A request exceeds a hard size guard.
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    /// A numerical model could not be constructed or evaluated.
    #[error("model error: {0}")]
    Model(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(name: &'static str, reason: impl Into<String>) -> Error {
    Error::Domain {
        name,
        reason: reason.into(),
    }
}

/// Rejects non-finite or non-positive values.
pub(crate) fn require_positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(domain(name, format!("must be finite and > 0, got {value}")))
    }
}

pub(crate) fn require_finite(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(domain(name, format!("must be finite, got {value}")))
    }
}
