use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid space: {0}")]
    InvalidSpace(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("theta = {theta} is inside the corner guard band (|sin θ| < {guard})")]
    CornerGuard { theta: f64, guard: f64 },

    #[error("lattice enumeration of {size} points exceeds the limit {limit}")]
    EnumerationTooLarge { size: f64, limit: f64 },

    #[error("quadrature under-resolved: {0}")]
    Quadrature(String),

    #[error("fit error: {0}")]
    Fit(String),

    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
