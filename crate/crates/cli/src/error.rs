use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] asymdiff::Error),

    #[error("cannot write output: {0}")]
    Output(#[from] std::io::Error),
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    /// 2 usage, 3 data, 4 numerical invariant.
    pub fn exit_code(&self) -> i32 {
        use asymdiff::Error as E;
        match self {
            CliError::Usage(_) => 2,
            CliError::Output(_) => 3,
            CliError::Core(e) if e.is_numerical() => 4,
            CliError::Core(e) if e.is_data_error() => 3,
            CliError::Core(E::NotSymmetric { .. } | E::Json(_)) => 3,
            CliError::Core(E::IncompatibleGrids(_)) => 4,
            CliError::Core(_) => 2,
        }
    }
}

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}
