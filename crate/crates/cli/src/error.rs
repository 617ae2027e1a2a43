use std::path::PathBuf;

use rising_sun::{DecomposeError, ParseError};
use thiserror::Error;

/// Every failure the front end reports, each with its own exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{context}: {source}")]
    Parse { context: String, source: ParseError },
    #[error("{0}")]
    LevelBelowMean(DecomposeError),
    #[error("{0}")]
    ZeroMeasure(DecomposeError),
    #[error("verification failed")]
    VerificationFailed,
    #[error("density and decomposition disagree: {0}")]
    DomainMismatch(String),
    #[error("unsupported dimension {0}: only 1-D and 2-D decompositions can be rendered")]
    UnsupportedDimension(usize),
    #[error("{0}")]
    InvalidCzInput(DecomposeError),
    #[error("unknown preset {0:?}; expected paper-counterexample, riesz-1d-step, or random")]
    UnknownPreset(String),
    #[error("{0}")]
    InvalidPolicy(String),
    #[error("{0}")]
    Internal(String),
}

pub mod exit {
    pub const USAGE: i32 = 2;
    pub const IO: i32 = 3;
    pub const PARSE: i32 = 4;
    pub const LEVEL_BELOW_MEAN: i32 = 5;
    pub const ZERO_MEASURE: i32 = 6;
    pub const VERIFICATION_FAILED: i32 = 7;
    pub const DOMAIN_MISMATCH: i32 = 8;
    pub const UNSUPPORTED_DIMENSION: i32 = 9;
    pub const INVALID_CZ_INPUT: i32 = 10;
    pub const UNKNOWN_PRESET: i32 = 11;
    pub const INVALID_POLICY: i32 = 12;
    pub const INTERNAL: i32 = 13;
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => exit::IO,
            CliError::Parse { .. } => exit::PARSE,
            CliError::LevelBelowMean(_) => exit::LEVEL_BELOW_MEAN,
            CliError::ZeroMeasure(_) => exit::ZERO_MEASURE,
            CliError::VerificationFailed => exit::VERIFICATION_FAILED,
            CliError::DomainMismatch(_) => exit::DOMAIN_MISMATCH,
            CliError::UnsupportedDimension(_) => exit::UNSUPPORTED_DIMENSION,
            CliError::InvalidCzInput(_) => exit::INVALID_CZ_INPUT,
            CliError::UnknownPreset(_) => exit::UNKNOWN_PRESET,
            CliError::InvalidPolicy(_) => exit::INVALID_POLICY,
            CliError::Internal(_) => exit::INTERNAL,
        }
    }

    pub(crate) fn parse(context: impl Into<String>, source: ParseError) -> Self {
        CliError::Parse { context: context.into(), source }
    }
}

impl From<DecomposeError> for CliError {
    fn from(e: DecomposeError) -> Self {
        match e {
            DecomposeError::LevelBelowMean { .. } => CliError::LevelBelowMean(e),
            DecomposeError::ZeroTotalMeasure => CliError::ZeroMeasure(e),
            DecomposeError::UnboundedPolicy | DecomposeError::InvalidPolicy(_) => CliError::InvalidPolicy(e.to_string()),
            DecomposeError::NotCube | DecomposeError::NegativeDensity | DecomposeError::NonLebesgue => {
                CliError::InvalidCzInput(e)
            }
            DecomposeError::NotOneDimensional(n) => CliError::UnsupportedDimension(n),
            other => CliError::Internal(other.to_string()),
        }
    }
}
