use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid interval [{lo}, {hi}): {reason}")]
    InvalidInterval {
        lo: String,
        hi: String,
        reason: &'static str,
    },

    #[error("image of scale/translate escapes [0,1]: factor {factor}, offset {offset}")]
    ScaleOutOfRange { factor: String, offset: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),

    #[error("index {index} has no predecessor block (it lies in block 1)")]
    NoPredecessor { index: usize },

    #[error("indices must be strictly increasing: {0:?}")]
    NotIncreasing(Vec<usize>),

    #[error("measure table is missing tuple {0:?}")]
    MissingTuple(Vec<usize>),

    #[error("line {line}: {message}")]
    Table { line: usize, message: String },

    #[error("table invariant violated at {tuple:?}: {message}")]
    TableInvariant { tuple: Vec<usize>, message: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("no compact witness found: {0}")]
    NoCompactWitness(String),

    #[error("not enough free room: {0}")]
    InsufficientRoom(String),

    #[error("explicit backend unavailable: {0}")]
    NeedsExplicit(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
