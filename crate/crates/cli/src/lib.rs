//! Pipeline behind the `rci` binary.
//!
//! Every command returns a [`CliError`] on failure; [`CliError::exit_code`]
//! gives the process status the binary reports.

pub mod commands;
pub mod config;
mod fsio;

pub use commands::report::{report, ReportOutput};
pub use commands::simulate::{simulate, SimulationOutput, SimulationRecord};
pub use commands::synth::{synth, SynthOutput};
pub use commands::verify::{verify, Check, VerifyReport, VerifyTolerances};
pub use config::{FilterSettings, ProjectConfig, SystemSource, OUTPUT_DIR_ENV};

use std::path::PathBuf;

use rci_core::rci::GridDiagnostic;
use thiserror::Error;

/// Exit statuses.
pub mod exit {
    pub const OK: u8 = 0;
    pub const CONFIG: u8 = 1;
    pub const INFEASIBLE: u8 = 2;
    pub const VERIFY_FAILED: u8 = 3;
    pub const MISSING_ARTIFACT: u8 = 4;
    pub const EMPTY_RUN_DIR: u8 = 5;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("synthesis infeasible for every λ on the grid")]
    Infeasible { diagnostics: Vec<GridDiagnostic> },
    #[error("verification failed: {}", offenders.join(", "))]
    VerificationFailed { report: Box<VerifyReport>, offenders: Vec<String> },
    #[error("artifact not found: {}", .0.display())]
    MissingArtifact(PathBuf),
    #[error("no metrics files in {}", .0.display())]
    EmptyRunDir(PathBuf),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Rci(#[from] rci_core::rci::RciError),
    #[error(transparent)]
    Quad(#[from] rci_quadsim::QuadError),
    #[error(transparent)]
    Filter(#[from] rci_core::filter::FilterError),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Infeasible { .. } => exit::INFEASIBLE,
            CliError::VerificationFailed { .. } => exit::VERIFY_FAILED,
            CliError::MissingArtifact(_) => exit::MISSING_ARTIFACT,
            CliError::EmptyRunDir(_) => exit::EMPTY_RUN_DIR,
            _ => exit::CONFIG,
        }
    }

    pub(crate) fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io {
            context: context.into(),
            source,
        }
    }
}
