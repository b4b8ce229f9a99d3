use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("uncoverable: {0}")]
    Uncoverable(String),
    #[error("pushout-precondition: {0}")]
    PushoutPrecondition(String),
    /// An inequality check failed; the payload is the full report.
    #[error("decomposition-violation: {summary}")]
    DecompositionViolation {
        summary: String,
        report: Box<serde_json::Value>,
    },
    #[error("verification failed: {summary}")]
    Verification {
        summary: String,
        report: Box<serde_json::Value>,
    },
}

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    /// Verification failures map to exit status 2, everything else to 1.
    pub fn is_verification(&self) -> bool {
        matches!(
            self,
            Error::DecompositionViolation { .. } | Error::Verification { .. }
        )
    }

    pub fn payload(&self) -> Option<&serde_json::Value> {
        match self {
            Error::DecompositionViolation { report, .. } | Error::Verification { report, .. } => {
                Some(report)
            }
            _ => None,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
