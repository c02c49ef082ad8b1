use std::path::PathBuf;

use sextic_lattice::lattice::LatticeError;
use sextic_lattice::roots::RootsError;
use sextic_lattice::sextic::{SexticError, TypeError};
use thiserror::Error;

/// Exit status for usage and parse errors.
pub const EXIT_USAGE: i32 = 2;
/// Exit status for failed verification and runtime errors.
pub const EXIT_FAILURE: i32 = 1;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("invalid type descriptor: {0}")]
    Type(#[from] TypeError),
    #[error(transparent)]
    Sextic(SexticError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Roots(#[from] RootsError),
    #[error("{0}")]
    NotElementary(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl From<SexticError> for CliError {
    fn from(e: SexticError) -> Self {
        match e {
            SexticError::Type(t) => CliError::Type(t),
            other => CliError::Sextic(other),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Type(_) => EXIT_USAGE,
            _ => EXIT_FAILURE,
        }
    }
}
