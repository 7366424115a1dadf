use std::path::PathBuf;

use thiserror::Error;

use crate::parse::ParseError;

/// Process exit codes.
pub mod exit {
    pub const OK: u8 = 0;
    pub const VERIFY_FAILED: u8 = 1;
    pub const DOMAIN: u8 = 2;
    pub const NON_CONVERGENCE: u8 = 3;
    pub const IO: u8 = 4;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error(transparent)]
    Core(#[from] heisenberg_green::Error),

    #[error("{0}")]
    Usage(String),

    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot write output: {0}")]
    Stdout(#[source] std::io::Error),

    #[error("cannot serialise output: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        use heisenberg_green::Error as E;
        match self {
            CliError::Parse(_) | CliError::Usage(_) => exit::DOMAIN,
            CliError::Core(
                E::NonConvergence { .. } | E::DepthExceeded { .. } | E::NonFinite(_),
            ) => exit::NON_CONVERGENCE,
            CliError::Core(_) => exit::DOMAIN,
            CliError::Io { .. } | CliError::Stdout(_) | CliError::Json(_) => exit::IO,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
