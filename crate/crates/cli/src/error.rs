use entire_core::Error;

/// Failure classes, each with its own process exit status.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("bad arguments: {0}")]
    BadArgs(String),
    #[error("hypothesis validation failed: {0}")]
    Hypothesis(String),
    #[error("solver fault: {0}")]
    Solver(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::BadArgs(_) => exit::BAD_ARGS,
            CliError::Hypothesis(_) => exit::HYPOTHESIS,
            CliError::Solver(_) => exit::SOLVER,
            CliError::Verification(_) => exit::VERIFICATION,
            CliError::Io(_) => exit::IO,
        }
    }
}

pub mod exit {
    pub const OK: i32 = 0;
    pub const BAD_ARGS: i32 = 2;
    pub const HYPOTHESIS: i32 = 3;
    pub const SOLVER: i32 = 4;
    pub const VERIFICATION: i32 = 5;
    pub const IO: i32 = 6;
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::InvalidInput(_) => CliError::BadArgs(msg),
            Error::Hypothesis(_) | Error::Precondition(_) => CliError::Hypothesis(msg),
            Error::NonFinite { .. } => CliError::Solver(msg),
            Error::OutOfRange { .. }
            | Error::Inapplicable(_)
            | Error::InsufficientDomain(_)
            | Error::NoEdge { .. }
            | Error::EdgeHypothesis { .. } => CliError::Verification(msg),
        }
    }
}
