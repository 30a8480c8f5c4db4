use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("letter `{0}` is not in the alphabet")]
    UnknownLetter(String),
    #[error("alphabet mismatch: expected {{{expected}}}, found {{{found}}}")]
    AlphabetMismatch { expected: String, found: String },
    #[error("arity mismatch: {0}")]
    ArityMismatch(String),
    #[error("budget of {0} exhausted")]
    BudgetExhausted(usize),
    #[error("language is not contained in {0}")]
    NotBoundedForm(String),
    #[error("{file}:{line}: {message}")]
    Parse {
        file: String,
        line: usize,
        message: String,
    },
    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            file: "<input>".to_string(),
            line,
            message: message.into(),
        }
    }

    /// Attaches a file name to a parse error; other errors pass through.
    pub fn in_file(self, name: &str) -> Self {
        match self {
            Error::Parse { line, message, .. } => Error::Parse {
                file: name.to_string(),
                line,
                message,
            },
            other => other,
        }
    }
}
