use thiserror::Error;

/// Errors produced by the discrepancy toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("coordinate {value} of point {point} (axis {axis}) is outside {range}")]
    OutOfRange {
        point: usize,
        axis: usize,
        value: f64,
        range: &'static str,
    },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{work:.3e} elementary operations needed, budget is {budget:.3e}; {hint}")]
    BudgetExceeded {
        work: f64,
        budget: f64,
        hint: &'static str,
    },

    #[error("numeric failure: {0}")]
    Numeric(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
        if expected == found {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected, found })
        }
    }

    pub(crate) fn check_budget(work: f64, budget: f64, hint: &'static str) -> Result<()> {
        if work <= budget {
            Ok(())
        } else {
            Err(Error::BudgetExceeded { work, budget, hint })
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
