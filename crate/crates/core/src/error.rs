//! Crate-wide error type.

use thiserror::Error;

/// Errors raised by confidence arithmetic, belief updates, flows and the CLI.
#[derive(Debug, Error)]
pub enum Error {
    #[error("confidence value from domain `{found}` used where domain `{expected}` is required")]
    DomainMismatch { expected: String, found: String },

    #[error("invalid confidence value for domain `{domain}`: {reason}")]
    InvalidConfidence { domain: String, reason: String },

    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    #[error("event has (near-)zero mass {mass:e}; update undefined")]
    ZeroMassEvent { mass: f64 },

    #[error("imaging map is invalid: {0}")]
    InvalidImagingMap(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("total conflict: Dempster normalizer {normalizer:e} vanishes")]
    TotalConflict { normalizer: f64 },

    #[error("invalid belief state: {0}")]
    InvalidBelief(String),

    #[error("`{what}` expects {expected}, got {found}")]
    KindMismatch {
        what: &'static str,
        expected: &'static str,
        found: String,
    },

    #[error("belief state is outside the learner's domain: {0}")]
    Domain(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("no limit reached after {steps} steps (last field norm {norm:e})")]
    NoLimit { steps: u64, norm: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("unknown learner `{0}`")]
    UnknownLearner(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Parameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for failures caused by a belief state outside the update's domain
    /// (zero-mass events, total conflict, exits from the domain during integration).
    pub fn is_domain_error(&self) -> bool {
        matches!(
            self,
            Error::ZeroMassEvent { .. }
                | Error::TotalConflict { .. }
                | Error::Domain(_)
                | Error::NoLimit { .. }
                | Error::Numerical(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
