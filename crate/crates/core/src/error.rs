use thiserror::Error;

use crate::instances::Violation;

/// Errors produced by the scheduling library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A document could not be parsed; `path` points at the offending field.
    #[error("parse error at {path}: {message}")]
    Parse { path: String, message: String },

    /// No feasible solution exists under the requested discretization or model.
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// An internal guarantee did not hold. This always indicates a bug or a
    /// violated precondition upstream.
    #[error("contract violation: {0}")]
    ContractViolation(String),

    /// The enumeration would exceed the configured size cap.
    #[error("size limit exceeded: {needed} states > cap {cap}")]
    SizeLimit { needed: u128, cap: u128 },

    /// The LP solver could not produce a certified answer.
    #[error("solver failure: {0}")]
    Solver(String),

    /// The schedule violates the instance constraints.
    #[error("invalid schedule: {} violation(s), first: {}", .0.len(), .0.first().map(|v| v.to_string()).unwrap_or_default())]
    InvalidSchedule(Vec<Violation>),
}

impl Error {
    pub(crate) fn parse(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
