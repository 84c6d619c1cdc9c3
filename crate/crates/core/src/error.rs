use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("grid mismatch: expected {expected} cells, got {got}")]
    GridMismatch { expected: usize, got: usize },

    #[error("steiner axis is not set on this grid")]
    NoSteinerAxis,

    #[error("eigensolver did not converge after {iterations} iterations (best residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),

    #[error("first eigenvalue is zero, the map is not differentiable here")]
    NotDifferentiable,

    #[error("infeasible problem: {0}")]
    Infeasible(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("unbounded problem: {0}")]
    Unbounded(String),

    #[error("size cap exceeded: {cells} active cells, oracle limit is {cap}")]
    SizeCap { cells: usize, cap: usize },

    #[error("cannot parse `{token}`: {reason}")]
    Parse { token: String, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

pub(crate) fn parse_err(token: impl Into<String>, reason: impl Into<String>) -> Error {
    Error::Parse {
        token: token.into(),
        reason: reason.into(),
    }
}
