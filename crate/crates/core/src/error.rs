use thiserror::Error;

/// Errors produced by the simulation, dataset and learning layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("size mismatch: expected {expected}, got {actual}")]
    SizeMismatch { expected: usize, actual: usize },

    #[error("graph is disconnected")]
    Disconnected,

    #[error("phase space mismatch: {0}")]
    SpaceMismatch(String),

    #[error(
        "draw budget exhausted after {draws} draws: {starved} class has {have} of {want} samples \
         (synchronizing {sync}, non-synchronizing {nonsync})"
    )]
    BudgetExhausted {
        starved: &'static str,
        have: usize,
        want: usize,
        draws: u64,
        sync: usize,
        nonsync: usize,
    },

    #[error("empty data: {0}")]
    EmptyData(String),

    #[error("unsupported model: {0}")]
    UnsupportedModel(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Stable machine-readable tag for the error variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::SizeMismatch { .. } => "size_mismatch",
            Error::Disconnected => "disconnected",
            Error::SpaceMismatch(_) => "space_mismatch",
            Error::BudgetExhausted { .. } => "budget_exhausted",
            Error::EmptyData(_) => "empty_data",
            Error::UnsupportedModel(_) => "unsupported_model",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
            Error::Csv(_) => "csv",
        }
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
