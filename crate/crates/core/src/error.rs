// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

/// Errors produced anywhere in the synthesis pipeline.
///
/// Variants fall into three families (see [`Error::kind`]): malformed input
/// text, structurally invalid requests, and work that exceeds a declared
/// enumeration or simulation budget.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },

    #[error("line {line}: sequential not supported ({construct})")]
    Sequential { line: usize, construct: String },

    #[error("dimension mismatch: {left} vs {right}")]
    Shape { left: String, right: String },

    #[error("invalid weights: {0}")]
    Weights(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("factorization degree {degree} out of range 1..={max}")]
    Degree { degree: usize, max: usize },

    #[error("net `{0}` has more than one driver")]
    DuplicateDriver(String),

    #[error("net `{0}` is used but never driven")]
    Undriven(String),

    #[error("combinational cycle through net `{0}`")]
    Cycle(String),

    #[error("node `{node}` has {fanin} fanins, exceeding the input bound k = {k}")]
    NodeTooWide { node: String, fanin: usize, k: usize },

    #[error("subcircuit {0} does not belong to this netlist")]
    StaleSubcircuit(usize),

    #[error("port mismatch: {0}")]
    Ports(String),

    #[error("{what} exceeds budget: {value} > {limit}")]
    Budget {
        what: &'static str,
        value: usize,
        limit: usize,
    },
}

/// Coarse classification used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Parse,
    Validation,
    Budget,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Syntax { .. } | Error::Sequential { .. } => ErrorKind::Parse,
            Error::Budget { .. } => ErrorKind::Budget,
            _ => ErrorKind::Validation,
        }
    }

    pub(crate) fn shape(left: impl Into<String>, right: impl Into<String>) -> Self {
        Error::Shape {
            left: left.into(),
            right: right.into(),
        }
    }

    pub(crate) fn syntax(line: usize, message: impl Into<String>) -> Self {
        Error::Syntax {
            line,
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
