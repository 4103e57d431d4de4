use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Error)]
pub enum QslError {
    #[error("unphysical Bloch vector: |r| = {norm} exceeds 1 (positivity violated)")]
    UnphysicalState { norm: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("pole encountered at {at}: {what}")]
    Pole { what: &'static str, at: f64 },

    #[error("{what} did not converge: achieved relative change {achieved:e}, target {target:e}")]
    NonConvergence {
        what: &'static str,
        achieved: f64,
        target: f64,
    },

    #[error("positivity lost during integration: minimum eigenvalue {min_eigenvalue:e}")]
    PositivityLost { min_eigenvalue: f64 },

    #[error("invalid scan grid: {0}")]
    Grid(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("serialization failed: {0}")]
    Serialization(String),
}

impl QslError {
    pub(crate) fn param(name: &'static str, value: f64, reason: &'static str) -> Self {
        QslError::InvalidParameter {
            name,
            value,
            reason,
        }
    }
}

impl From<csv::Error> for QslError {
    fn from(e: csv::Error) -> Self {
        QslError::Serialization(e.to_string())
    }
}

impl From<serde_json::Error> for QslError {
    fn from(e: serde_json::Error) -> Self {
        QslError::Serialization(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, QslError>;
