use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("young function failed sampled validation: {0}")]
    ValidationFailure(String),

    #[error("could not bracket the inverse of g at t = {0}")]
    RootBracketFailure(f64),

    #[error("quadrature did not converge: {0}")]
    QuadratureNonconvergence(String),

    #[error("invalid interval ({a}, {b}) with {n_elements} elements")]
    InvalidInterval { a: f64, b: f64, n_elements: usize },

    #[error("non-finite value {value} at node {node}")]
    NonFiniteValue { node: usize, value: f64 },

    #[error("fractional order s = {0} is out of range")]
    OrderOutOfRange(f64),

    #[error("scale tau must be positive, got {0}")]
    NonPositiveScale(f64),

    #[error("luxemburg root-finding failed: {0}")]
    LuxemburgNonconvergence(String),

    #[error("operation requires a nonzero field")]
    ZeroField,

    #[error("young function not admitted for s = {s}: {reason}")]
    NotAdmitted { s: f64, reason: String },

    #[error("matrix oracle requires the power family with p = 2")]
    WrongFamily,

    #[error("linear algebra failure: {0}")]
    LinearAlgebra(String),

    #[error("configuration error: {0}")]
    Config(String),
}

impl Error {
    /// Configuration-class errors map to exit code 2 in the CLI, everything
    /// else is a numerical failure.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter(_)
                | Error::InvalidInterval { .. }
                | Error::OrderOutOfRange(_)
                | Error::NotAdmitted { .. }
                | Error::WrongFamily
                | Error::Config(_)
        )
    }
}
