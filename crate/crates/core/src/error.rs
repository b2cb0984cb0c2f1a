use thiserror::Error;

use crate::clp::FractionalSolution;
use crate::mk::MkSolution;
use crate::pricing::PricedColumn;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid instance: {}{field}: {message}", item.as_ref().map(|i| format!("item `{i}`, ")).unwrap_or_default())]
    Validation {
        item: Option<String>,
        field: String,
        message: String,
    },

    #[error("unknown item `{0}`")]
    UnknownItem(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("configuration exceeds capacity in dimension {dimension} (load {load})")]
    InfeasibleInput { dimension: usize, load: f64 },

    /// The pricing search hit its node cap. Carries the best column found
    /// and an upper bound on the optimal pricing value.
    #[error("pricing search budget exceeded after {nodes} nodes")]
    PricingBudgetExceeded {
        nodes: u64,
        best: Box<PricedColumn>,
        upper_bound: f64,
    },

    /// An exact MK or 2VMK search hit its node cap.
    #[error("multiple knapsack search budget exceeded after {nodes} nodes")]
    MkBudgetExceeded {
        nodes: u64,
        best: Box<MkSolution>,
        upper_bound: f64,
    },

    /// Column generation ran out of rounds before certifying the requested gap.
    /// The carried solution is primal feasible with `converged == false`.
    #[error("column generation budget exhausted (certified gap {:.3e})", .0.certified_gap)]
    BudgetExhausted(Box<FractionalSolution>),

    #[error("degenerate instance: {0}")]
    DegenerateInstance(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl Error {
    pub(crate) fn validation(item: Option<&str>, field: &str, message: impl Into<String>) -> Self {
        Error::Validation {
            item: item.map(str::to_owned),
            field: field.to_owned(),
            message: message.into(),
        }
    }
}
