use em_manifold_core::Error;

/// Command failures, each mapped to a process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    MomentFile(String),
    #[error("{0}")]
    Singularity(String),
    #[error("{0}")]
    Infeasible(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Config(_) | CliError::MomentFile(_) | CliError::Io(_) => 2,
            CliError::Singularity(_) => 3,
            CliError::Infeasible(_) => 4,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Singularity { .. } | Error::DegenerateDirection => CliError::Singularity(e.to_string()),
            Error::NoRadiatingMode
            | Error::PolarizationInNullSpace
            | Error::ZeroPdMatrix
            | Error::UnboundedPdConstraint
            | Error::ReferenceNull => CliError::Infeasible(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}
