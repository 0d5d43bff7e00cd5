use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// A configuration or input parameter violates its documented invariant.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A configuration document could not be parsed.
    #[error("config error: {0}")]
    Config(String),

    /// The wage bracket could not be established.
    #[error("wage bracket expansion failed: {0}")]
    Bracket(String),

    /// A linear system or rank-one update broke down numerically.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// A trajectory aborted at a given period.
    #[error("period {period}: {source}")]
    Period {
        period: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by bad configuration rather than numerical breakdown.
    pub fn is_config(&self) -> bool {
        match self {
            Error::InvalidInput(_) | Error::Config(_) | Error::Json(_) => true,
            Error::Period { source, .. } => source.is_config(),
            _ => false,
        }
    }

    /// Process exit code: 2 for solver or numerical failures, 1 for everything else
    /// (configuration, input and I/O errors).
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Bracket(_) | Error::Numerical(_) => 2,
            Error::Period { source, .. } => source.exit_code(),
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidInput(msg()))
    }
}
