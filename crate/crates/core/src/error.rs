use thiserror::Error;

#[derive(Debug, Error)]
pub enum GecoError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("column {column} is numerically dependent on the preceding columns (residual norm {residual:.3e})")]
    DegenerateColumn { column: usize, residual: f64 },

    #[error("invalid observation set: {0}")]
    InvalidObservations(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("inner solver did not converge after {iterations} iterations (gradient norm {gradient_norm:.3e})")]
    NotConverged {
        iterations: usize,
        gradient_norm: f64,
    },

    #[error("iteration {iteration}: {source}")]
    Iteration {
        iteration: usize,
        #[source]
        source: Box<GecoError>,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, GecoError>;
