use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument fell outside the domain of the function.
    #[error("{func}: {reason}")]
    Domain { func: &'static str, reason: String },

    /// An iterative routine ran out of iterations.
    #[error("{func}: no convergence after {iterations} iterations")]
    NoConvergence { func: &'static str, iterations: usize },

    /// The series cannot support the requested statistic (zero variance, too short).
    #[error("degenerate series: {0}")]
    Degenerate(String),

    /// The requested confidence cannot be reached by the modified Wald test at this sample size.
    #[error("confidence {confidence} unreachable with the modified Wald test at n = {n}")]
    Unreachable { confidence: f64, n: usize },

    #[error("invalid table spec: {0}")]
    InvalidTable(String),

    #[error("parse error at row {row}: {reason}")]
    Parse { row: usize, reason: String },
}

impl Error {
    pub fn domain(func: &'static str, reason: impl Into<String>) -> Self {
        Error::Domain {
            func,
            reason: reason.into(),
        }
    }
}
