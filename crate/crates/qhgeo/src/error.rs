use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("point lies outside the domain")]
    OutsideDomain,

    #[error("unsupported norm/domain combination: {0}")]
    UnsupportedCombination(String),

    #[error("path exits the domain")]
    PathExitsDomain,

    #[error("grid resolution too coarse: {0}")]
    ResolutionTooCoarse(String),

    #[error("modulus samples are not of power type: {0}")]
    NotPowerType(String),

    #[error("no usable pairs in input set")]
    EmptyEffectiveSet,

    #[error("path pair violates condition ({0})")]
    ConditionViolated(&'static str),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
