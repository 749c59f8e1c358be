use thiserror::Error;

/// Failure modes shared by the library and the command-line driver.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input: the field path names the offending value.
    #[error("invalid {field}: {message}")]
    Validation { field: String, message: String },

    #[error("small divisor {divisor:e} for frequency combination {combination:?}")]
    SmallDivisor { combination: Vec<i64>, divisor: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn numerical(message: impl Into<String>) -> Self {
        Error::Numerical(message.into())
    }

    /// Process exit code used by the CLI: 2 for bad input, 3 for numerical trouble.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Validation { .. } | Error::Io { .. } => 2,
            Error::SmallDivisor { .. } | Error::Numerical(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
