use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("index {index} out of range for rank {rank}")]
    IndexOutOfRange { index: usize, rank: usize },
    #[error("odd number of boundary points: {0}")]
    OddBoundary(usize),
    #[error("rewrite budget of {budget} steps exceeded ({terms} terms pending)")]
    NonTermination { budget: usize, terms: usize, partial: String },
    #[error("unsupported parameter: {0}")]
    UnsupportedParameter(String),
    #[error("truncated Verma module cutoff {0} exceeded")]
    CutoffExceeded(usize),
    #[error("no value bound for: {0}")]
    SpecializationMissing(String),
    #[error("empty graded space")]
    EmptySpace,
    #[error("singular bilinear form")]
    SingularForm,
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("underdetermined solve: {0}")]
    SolveUnderdetermined(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
