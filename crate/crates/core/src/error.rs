use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Dimension or ratio vector outside the admissible range.
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    /// A scalar parameter is outside its documented range.
    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    /// Evaluation point outside the domain of the condenser.
    #[error("point outside the domain: {0}")]
    OutOfDomain(String),

    /// Grid masks violate the separation requirements.
    #[error("condenser grid geometry: {0}")]
    Geometry(String),

    /// Iterative or quadrature routine failed to reach its tolerance.
    #[error("numeric failure after {iterations} iterations: {reason}")]
    Numeric { reason: String, iterations: usize },

    /// Series truncated too early for the requested accuracy.
    #[error(
        "truncation at degree {j_max} too small: remainder bound {achieved:e} exceeds {required:e}"
    )]
    Truncation {
        j_max: usize,
        achieved: f64,
        required: f64,
    },

    /// Symbol not supported by the diagonal (monomial) path.
    #[error("unsupported symbol: {0}")]
    UnsupportedSymbol(String),

    /// Malformed or non-finite input data.
    #[error("invalid data: {0}")]
    Data(String),

    /// Requested size exceeds the configured cap.
    #[error("resource limit: requested {requested}, cap {cap}")]
    Resource { requested: usize, cap: usize },

    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Parameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn numeric(reason: impl Into<String>, iterations: usize) -> Self {
        Error::Numeric {
            reason: reason.into(),
            iterations,
        }
    }
}
