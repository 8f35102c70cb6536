use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid tree: {0}")]
    InvalidTree(String),
    #[error("stage {stage} out of range 0..={depth}")]
    StageOutOfRange { stage: usize, depth: usize },
    #[error("leaf {leaf} out of range (tree has {leaves} leaves)")]
    LeafOutOfRange { leaf: usize, leaves: usize },
    #[error("length mismatch: expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("stage map is not a stopping time: {0}")]
    NotAdapted(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid strategy: {0}")]
    InvalidStrategy(String),
    #[error("event is not measurable: {0}")]
    NotMeasurable(String),
    #[error("enumeration cap exceeded: {count} strategies > cap {cap}")]
    CapExceeded { count: u128, cap: u128 },
    #[error("invalid operator: {0}")]
    InvalidOperator(String),
    #[error("non-finite value produced by {0}")]
    NonFinite(String),
    #[error("no grid index attains value = payoff for leaf {0}")]
    NoHittingIndex(usize),
    #[error("config: {0}")]
    Config(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
