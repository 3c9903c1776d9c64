use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("singular point: {0}")]
    SingularPoint(String),

    #[error("field is not symmetric: two representative lifts differ by {max_diff:e}")]
    SymmetryViolation { max_diff: f64 },

    #[error("quantity is singular on the t-axis (sigma = 0)")]
    AxisSingularity,

    #[error("quadrature did not reach tolerance: best estimate {best:e}, error estimate {estimate:e}")]
    Accuracy { best: f64, estimate: f64 },

    #[error("linear solve failed: relative residual {residual:e}")]
    Solver { residual: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
