use isicode::channel::ChannelError;
use isicode::constellation::ConstellationError;
use isicode::minimal_basis::BasisError;
use isicode::multilevel::MultilevelError;
use isicode::trellis::TrellisError;
use isicode::{CodeError, FieldError};
use thiserror::Error;

/// Errors that stop a command before any guarantee is checked. All map to
/// exit code 2.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}:{line}: {msg}")]
    Parse { path: String, line: usize, msg: String },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Basis(#[from] BasisError),
    #[error(transparent)]
    Trellis(#[from] TrellisError),
    #[error(transparent)]
    Constellation(#[from] ConstellationError),
    #[error(transparent)]
    Multilevel(#[from] MultilevelError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
}
