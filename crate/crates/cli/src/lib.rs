//! Scenario runner for the `tvs` binary.

pub mod config;
pub mod output;
pub mod runner;

use std::path::{Path, PathBuf};

use tvs_core::Error;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),

    #[error("cannot access {}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("audit invariant violated: {0}")]
    Invariant(String),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    /// Process exit code for this failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => 1,
            CliError::Invariant(_) => 2,
            CliError::Core(e) => match e {
                Error::PositivityLost { .. }
                | Error::NonPositiveTemperature(_)
                | Error::NotPositiveDefinite { .. }
                | Error::OutOfRange { .. } => 2,
                Error::PoissonNoConvergence { .. }
                | Error::BlowupDetected { .. }
                | Error::QuadratureFailure { .. } => 3,
                Error::ConfigParse { .. }
                | Error::InvalidParameter { .. }
                | Error::IncompatibleScenario(_)
                | Error::CflViolation { .. }
                | Error::InvalidGrid(_)
                | Error::FieldSize { .. }
                | Error::Snapshot(_) => 1,
            },
        }
    }
}

/// Exit code when a study runs to completion but misses its thresholds.
pub const EXIT_THRESHOLD: i32 = 4;

#[cfg(test)]
mod tests {
    use super::*;
    use tvs_core::PositivityField;

    #[test]
    fn exit_codes() {
        let pos = Error::PositivityLost {
            field: PositivityField::DetF,
            i: 0,
            j: 0,
            value: -1.0,
            t: 0.0,
        };
        assert_eq!(CliError::from(pos).exit_code(), 2);
        assert_eq!(
            CliError::from(Error::PoissonNoConvergence {
                iterations: 1,
                residual: 1.0
            })
            .exit_code(),
            3
        );
        assert_eq!(
            CliError::from(Error::IncompatibleScenario(String::new())).exit_code(),
            1
        );
        assert_eq!(CliError::Invariant(String::new()).exit_code(), 2);
        assert_eq!(
            CliError::io(Path::new("x"), std::io::Error::other("x")).exit_code(),
            1
        );
    }
}
