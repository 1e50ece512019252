use thiserror::Error;

/// Failure of a command, carrying its exit status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error:\n  {}", .0.join("\n  "))]
    Config(Vec<String>),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("refused: {0}")]
    SizeCap(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(vec![msg.into()])
    }

    /// 0 success, 2 config error, 3 invariant violation, 4 size-cap refusal, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Invariant(_) => 3,
            CliError::SizeCap(_) => 4,
            CliError::Io(_) | CliError::Runtime(_) => 1,
        }
    }
}

impl From<eqshare_core::Error> for CliError {
    fn from(e: eqshare_core::Error) -> Self {
        use eqshare_core::Error as E;
        match e {
            E::SizeCap { .. } => CliError::SizeCap(e.to_string()),
            E::Dimension { .. } | E::InvalidStrategy(_) | E::InvalidParameter(_) | E::Unsupported(_) => {
                CliError::config(e.to_string())
            }
            E::BeyondHorizon { .. } => CliError::Runtime(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
