use thiserror::Error;

use crate::calculus::CalcError;
use crate::td::TdReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{format} line {line}: {message}")]
    Parse {
        format: &'static str,
        line: usize,
        message: String,
    },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("refusing {what} = {value}: exceeds cap {cap}{hint}")]
    CapExceeded {
        what: &'static str,
        value: usize,
        cap: usize,
        hint: &'static str,
    },

    #[error("infinite diameter: graph is disconnected")]
    InfiniteDiameter,

    #[error("graph has no vertices")]
    EmptyGraph,

    #[error("invalid tree decomposition: {0}")]
    InvalidDecomposition(Box<TdReport>),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("no active bags")]
    NoActiveBags,

    #[error("unknown reduction `{0}`")]
    UnknownReduction(String),

    #[error("missing source parameter `{0}`")]
    MissingParameter(String),

    #[error(transparent)]
    Calc(#[from] CalcError),
}

impl Error {
    pub(crate) fn parse(format: &'static str, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            format,
            line,
            message: message.into(),
        }
    }
}
