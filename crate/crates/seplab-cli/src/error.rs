use serde::Serialize;
use thiserror::Error;

use seplab::initdata::InitError;
use seplab::inner_rhp::InnerError;
use seplab::pde::PdeError;
use seplab::pii::PiiError;
use seplab::waveform::WaveError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}: {1}")]
    Io(String, #[source] std::io::Error),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("check failed: {0}")]
    Check(String),
    #[error(transparent)]
    Hierarchy(#[from] PiiError),
    #[error(transparent)]
    Inner(#[from] InnerError),
    #[error(transparent)]
    Init(#[from] InitError),
    #[error(transparent)]
    Wave(#[from] WaveError),
    #[error(transparent)]
    Pde(#[from] PdeError),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Io(..) => "io",
            CliError::Argument(_) => "argument",
            CliError::Check(_) => "check",
            CliError::Hierarchy(_) => "hierarchy",
            CliError::Inner(_) => "inner",
            CliError::Init(_) => "initdata",
            CliError::Wave(_) => "waveform",
            CliError::Pde(_) => "pde",
            CliError::Json(_) => "json",
            CliError::Csv(_) => "csv",
        }
    }
}

/// Printed to stdout when a command fails.
#[derive(Debug, Serialize)]
pub struct ErrorReport<'a> {
    pub status: &'static str,
    pub command: &'a str,
    pub kind: &'static str,
    pub message: String,
}
