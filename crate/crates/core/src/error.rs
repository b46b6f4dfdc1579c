use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("diffusion matrix is singular (|det| = {det:e})")]
    SingularSigma { det: f64 },

    #[error("non-finite or exploding state at step {step} of path {path}")]
    NumericalBlowup { path: usize, step: usize },

    #[error("level {level} exceeds the exact dyadic depth limit of {max}")]
    DepthLimit { level: u32, max: u32 },

    #[error("catalog: {0}")]
    Catalog(String),

    #[error("drift `{0}` has no compact support")]
    UnsupportedDrift(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("fit: {0}")]
    Fit(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidConfig(msg.into())
}
