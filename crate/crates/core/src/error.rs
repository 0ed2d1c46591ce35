use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("shape mismatch: expected {expected} values, got {actual}")]
    Shape { expected: usize, actual: usize },
    #[error("value {value} at index {index} is outside [{lower}, {upper}]")]
    Domain {
        index: usize,
        value: f64,
        lower: f64,
        upper: f64,
    },
    #[error("invalid topology: {0}")]
    Topology(&'static str),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("insufficient data: need at least {needed} points, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("evaluation budget of {0} exhausted")]
    BudgetExhausted(usize),
    #[error("numerical failure: {0}")]
    Numerical(&'static str),
}
