use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::config::ConfigError;
use crate::snapshot::SnapshotError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),

    /// The core library rejected the setup (grid, packet, propagator).
    #[error("invalid setup: {0}")]
    Setup(dwps_core::Error),

    #[error("{0}")]
    Numerical(dwps_core::Error),

    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },

    #[error("{}: {source}", path.display())]
    Snapshot { path: PathBuf, source: SnapshotError },

    #[error("{} of {total} sweep runs failed:{}", failures.len(), list(failures))]
    Sweep { total: usize, failures: Vec<(String, CliError)> },

    #[error("invariant checks failed: {0}")]
    Check(String),
}

fn list(failures: &[(String, CliError)]) -> String {
    failures.iter().map(|(label, e)| format!("\n  {label}: {e}")).collect()
}

impl From<dwps_core::Error> for CliError {
    fn from(e: dwps_core::Error) -> Self {
        use dwps_core::Error as E;
        match e {
            E::InvalidGrid(_)
            | E::InvalidWavepacket(_)
            | E::InvalidConfig(_)
            | E::ThresholdOutsideGrid(_)
            | E::ShiftOutOfDomain { .. }
            | E::DegenerateMajorana(_)
            | E::ZeroNorm => CliError::Setup(e),
            _ => CliError::Numerical(e),
        }
    }
}

impl CliError {
    pub fn io(path: &Path, source: io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Setup(_) => EXIT_CONFIG,
            CliError::Numerical(_) | CliError::Check(_) => EXIT_NUMERICAL,
            CliError::Io { .. } | CliError::Snapshot { .. } => EXIT_IO,
            CliError::Sweep { failures, .. } => {
                failures.iter().map(|(_, e)| e.exit_code()).max().unwrap_or(EXIT_OK)
            }
        }
    }
}
