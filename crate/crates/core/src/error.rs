use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the solver library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument is outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A precondition on the inputs (shapes, grids, certificates) does not hold.
    #[error("contract violation: {0}")]
    Contract(String),

    /// The Laplace-domain image produced a non-finite value at a contour node.
    #[error("non-finite transform value at contour node {node} (s = {s}, t = {t})")]
    Evaluation { node: usize, s: Complex64, t: f64 },

    /// A computed object failed one of its post-hoc invariants.
    #[error("invariant violated: {0}")]
    Invariant(String),

    /// A linear solve or factorization broke down.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Malformed text input.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn contract(msg: impl Into<String>) -> Error {
    Error::Contract(msg.into())
}
