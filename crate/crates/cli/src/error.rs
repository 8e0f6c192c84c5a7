use thiserror::Error;

/// Runner errors, each with a distinct process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),

    #[error("unknown experiment `{0}` (see `condmean-lab list`)")]
    UnknownExperiment(String),

    #[error("parameter outside the validity window: {0}")]
    ParamWindow(String),

    #[error("engine failure: {0}")]
    Engine(#[from] condmean_core::Error),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::UnknownExperiment(_) => 3,
            CliError::ParamWindow(_) => 4,
            CliError::Engine(_) => 5,
            CliError::Io(_) => 2,
        }
    }
}
