use thiserror::Error;
use torus_ns::TorusError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("solver aborted: {0}")]
    Solver(TorusError),

    #[error("invariant check failed: {0}")]
    Invariant(String),

    #[error(transparent)]
    Engine(TorusError),

    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Engine(_) | CliError::Io { .. } => 2,
            CliError::Solver(_) => 3,
            CliError::Invariant(_) => 4,
        }
    }
}

impl From<TorusError> for CliError {
    fn from(e: TorusError) -> Self {
        match e {
            TorusError::BlowUp { .. } | TorusError::StepRejected { .. } => CliError::Solver(e),
            TorusError::NotDivergenceFree { t, .. } if t > 0.0 => CliError::Solver(e),
            other => CliError::Engine(other),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
