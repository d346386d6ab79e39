use thiserror::Error;

/// Errors raised by the word, metric, matrix and walk layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("generator index {index} out of range for rank {rank}")]
    IndexOutOfRange { index: i64, rank: usize },

    #[error("rank {0} is not supported (expected 1..=26)")]
    InvalidRank(usize),

    #[error("rank mismatch: {left} vs {right}")]
    RankMismatch { left: usize, right: usize },

    #[error("word budget of {budget} letters exceeded")]
    WordBudgetExceeded { budget: usize },

    #[error("integer budget of {budget} bits exceeded")]
    BitBudgetExceeded { budget: u64 },

    #[error("parse error at {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("supplied inverse fails on generator {generator}: got {got}")]
    InverseCheck { generator: char, got: String },

    #[error("image of generator {0} is empty")]
    EmptyImage(char),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix is not square or has no entries")]
    MalformedMatrix,

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("invalid metric sample: {0}")]
    InvalidSample(String),

    #[error("four-point estimate needs at least 4 points, got {0}")]
    TooFewPoints(usize),

    #[error("no probe at positive distance")]
    NoUsableProbe,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
