//! System-description ingestion, command dispatch, and report emission for
//! the AH mean-dimension engine.

pub mod commands;
pub mod description;
pub mod report;

use ahmd_core::error::{
    BranchedError, ComplexError, CoverError, MapError, NerveError, SetError, SystemError,
    VariationError,
};

/// CLI error taxonomy mapped to exit codes: validation problems exit 2,
/// internal invariant violations exit 3.
#[derive(Debug, Clone)]
pub enum CliError {
    Validation(String),
    Internal(String),
}

impl CliError {
    pub fn validation(msg: String) -> CliError {
        CliError::Validation(msg)
    }

    pub fn internal(msg: String) -> CliError {
        CliError::Internal(msg)
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "validation error: {m}"),
            CliError::Internal(m) => write!(f, "internal invariant violation: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

macro_rules! from_engine_error {
    ($($t:ty),+) => {
        $(impl From<$t> for CliError {
            fn from(e: $t) -> CliError {
                CliError::Validation(e.to_string())
            }
        })+
    };
}

from_engine_error!(
    ComplexError,
    SetError,
    MapError,
    CoverError,
    SystemError,
    NerveError,
    BranchedError,
    VariationError
);
