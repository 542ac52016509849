//! Config-driven experiment runner around the `widthlab` library.
//!
//! Each experiment reads a TOML config, validates every parameter up
//! front, and writes CSV tables with JSON sidecars plus a `run.json`
//! manifest into the output directory.

// NaN must fail validation, hence `!(x > 0.0)` rather than `x <= 0.0`.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod run;
pub mod verify;

mod artifact;

pub use artifact::SCHEMA_VERSION;
pub use config::{ExperimentConfig, ExperimentKind, Plan};
pub use run::{run, RunArtifact};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage error: {0}")]
    Usage(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("acceptance failure: {0}")]
    Acceptance(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Acceptance(_) => 4,
        }
    }

    /// Wraps a library error with the config field or stage it came from.
    pub fn module(context: &str, e: widthlab::Error) -> Self {
        use widthlab::Error as E;
        match e {
            E::Numeric { .. } | E::Truncation { .. } => {
                CliError::Numeric(format!("{context}: {e}"))
            }
            _ => CliError::Usage(format!("{context}: {e}")),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
