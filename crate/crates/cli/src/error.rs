use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cli::{op}: {msg}")]
    Config { op: &'static str, msg: String },

    #[error("{0}")]
    Numerical(autoion::Error),

    #[error("cli::{op}: {msg}")]
    Io { op: &'static str, msg: String },

    #[error("cli::run_verify: {0} check(s) failed")]
    VerifyFailed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 1,
            CliError::Numerical(_) | CliError::Io { .. } => 2,
            CliError::VerifyFailed(_) => 3,
        }
    }
}

impl From<autoion::Error> for CliError {
    fn from(e: autoion::Error) -> Self {
        use autoion::Error as E;
        match e {
            E::InvalidParameters { .. }
            | E::UndefinedParameter { .. }
            | E::InvalidPump { .. }
            | E::InvalidGrid(_)
            | E::InvalidInput { .. }
            | E::TruncationOverflow { .. } => CliError::Config { op: "resolve", msg: e.to_string() },
            other => CliError::Numerical(other),
        }
    }
}
