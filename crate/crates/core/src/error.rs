use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("prior is not a probability distribution: {0}")]
    NonstochasticPrior(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("table of {entries} entries exceeds the configured bound {limit}")]
    OverflowGuard { entries: u128, limit: u128 },
    #[error("not a valid quantum strategy: {0}")]
    NotAStrategy(String),
    #[error("search or problem size {size} exceeds budget {budget}")]
    BudgetExceeded { size: u128, budget: u128 },
    #[error("problem is infeasible")]
    Infeasible,
    #[error("problem is unbounded")]
    Unbounded,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("invalid nu matrix: {0}")]
    BadNu(String),
    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("moment matrix of dimension {dim} exceeds the limit {limit}")]
    SizeBudget { dim: usize, limit: usize },
    #[error("numerical failure: {msg}")]
    NumericalFailure { msg: String, trace: Vec<String> },
    #[error("certificate rounding failed: {0}")]
    RoundingFailed(String),
    #[error("argument outside its domain: {0}")]
    Domain(String),
    #[error("projection is not rank one: {0}")]
    NotRankOne(String),
    #[error("no unique phase solution")]
    NoUniqueSolution,
    #[error("input entries must be strictly positive")]
    NonpositiveInput,
    #[error("no Hadamard-like unitary could be constructed: {0}")]
    NotConstructible(String),
    #[error("polynomial degree {degree} exceeds the cap {limit}")]
    DegreeCap { degree: usize, limit: usize },
    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    pub(crate) fn parse(pos: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            pos,
            msg: msg.into(),
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::parse(e.column(), e.to_string())
    }
}
