use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config line {line}: {message}")]
    Syntax { line: usize, message: String },

    #[error("invalid `{field}`: {message}")]
    Field { field: String, message: String },

    #[error("{0}")]
    Core(#[from] outlab::Error),

    #[error("input schema: {0}")]
    Schema(String),

    #[error("{0}")]
    Io(#[from] std::io::Error),

    #[error("thread pool: {0}")]
    Threads(String),
}

impl CliError {
    pub fn field(field: impl Into<String>, message: impl Into<String>) -> CliError {
        CliError::Field {
            field: field.into(),
            message: message.into(),
        }
    }

    /// 2 for anything the user can fix in the input, 3 for an exhausted
    /// budget, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) | CliError::Threads(_) => 1,
            CliError::Core(outlab::Error::WordBudgetExceeded { .. } | outlab::Error::BitBudgetExceeded { .. }) => 3,
            _ => 2,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
