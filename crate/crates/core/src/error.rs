use thiserror::Error;

/// Errors raised by the library. The CLI maps parse and usage failures to
/// exit code 2 and everything else to exit code 1.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("malformed filter spec: {0}")]
    Spec(String),

    #[error("incomplete correlator table, missing {} string(s): {}", missing.len(), missing.join(","))]
    IncompleteTable { missing: Vec<String> },

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("parse error in {file}: field `{field}`: {msg}")]
    Parse {
        file: String,
        field: String,
        msg: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(file: impl Into<String>, field: impl Into<String>, msg: impl ToString) -> Self {
        Error::Parse {
            file: file.into(),
            field: field.into(),
            msg: msg.to_string(),
        }
    }
}
