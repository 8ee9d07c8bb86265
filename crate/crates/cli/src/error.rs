use std::io;

use crate::config::ConfigError;
use crate::table::TableError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error at {0}")]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Core(#[from] phononflux_core::Error),
    #[error(transparent)]
    Table(#[from] TableError),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: io::Error,
    },
    #[error("could not start worker pool: {0}")]
    Threads(String),
}

impl CliError {
    /// 1 for bad input, 2 for numerical failures.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_numerical() => 2,
            CliError::Table(TableError::NonFinite { .. }) => 2,
            _ => 1,
        }
    }
}
