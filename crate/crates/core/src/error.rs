use alloc::string::String;

/// Errors produced by the robustness kernels.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dataset must contain both classes")]
    SingleClass,

    #[error("no sign change on bracket [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("trivial classifier: {0}")]
    TrivialClassifier(String),

    #[error("unsupported method: {0}")]
    UnsupportedMethod(String),

    #[error("attack found no label-flipping perturbation")]
    NoFlipFound,

    #[error("attack failed to flip the label of point {index}")]
    AttackFailed { index: usize },

    #[error("{0} did not converge")]
    NotConverged(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
        if expected == found {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected, found })
        }
    }
}
