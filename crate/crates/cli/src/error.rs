use curved_nbody::Error;

/// Failures of a CLI command, each tied to an exit status.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("singular configuration: bodies {i} and {j} collide")]
    Singular { i: usize, j: usize },

    #[error("integration failed: {0}")]
    Underflow(String),

    #[error("{0}")]
    Domain(String),

    #[error("{failed} check(s) failed")]
    Verification { failed: usize },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Domain(_) => 2,
            CliError::Singular { .. } => 3,
            CliError::Underflow(_) => 4,
            CliError::Verification { .. } | CliError::Io(_) => 1,
        }
    }
}

/// Classifies a failure raised while integrating. Bodies are numbered from 1.
pub fn from_integration(err: Error) -> CliError {
    match err {
        Error::SingularConfiguration { i, j } => CliError::Singular { i: i + 1, j: j + 1 },
        Error::StepUnderflow { .. } | Error::NotProjectable(_) => CliError::Underflow(err.to_string()),
        other => CliError::Config(other.to_string()),
    }
}
