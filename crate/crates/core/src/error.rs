use thiserror::Error;

use crate::policy::Class;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid action token {0:?}: expected [A-Za-z0-9_]+")]
    InvalidToken(String),
    #[error("trace literal: {0}")]
    TraceLiteral(String),
    #[error("last action of the empty trace is undefined")]
    EmptyTrace,
    #[error("a lasso loop must not be empty")]
    EmptyLoop,
    #[error("action {0:?} is not in the alphabet")]
    UnknownAction(String),
    #[error("action {action:?} is in class {actual}, not {expected}")]
    ClassMismatch {
        action: String,
        expected: Class,
        actual: Class,
    },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid policy: {0}")]
    Validation(String),
    #[error("io error on {path}: {msg}")]
    Io { path: String, msg: String },
    #[error("resource budget exceeded: {0}")]
    Budget(String),
    #[error("{0}")]
    Usage(String),
    #[error("strategy {strategy} does not go with {eq} equivalence")]
    Incompatible { strategy: String, eq: String },
    #[error("policy is not reasonable: the empty execution is invalid")]
    NotReasonable,
    #[error("compliance failure: {0}")]
    Compliance(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
