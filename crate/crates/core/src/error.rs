use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    /// Postselection on an event whose probability is below the null threshold.
    #[error("{operation}: postselection on a null event (probability {probability:e})")]
    NullPostselection {
        operation: &'static str,
        probability: f64,
    },

    #[error("resource limit: {0}")]
    Resource(String),

    #[error("predictor undefined: {0}")]
    UndefinedPrediction(String),

    #[error("promise violated: {0}")]
    PromiseViolation(String),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }
}
