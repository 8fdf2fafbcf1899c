use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("input contains no {0}")]
    EmptyInput(&'static str),

    #[error("node index {index} out of range (n = {n})")]
    NodeOutOfRange { index: usize, n: usize },

    #[error("node {0} unassigned")]
    UnassignedNode(usize),

    #[error("line {line}: node {node} assigned more than once")]
    DuplicateNode { node: String, line: usize },

    #[error("line {line}: unknown node id `{node}`")]
    UnknownNode { node: String, line: usize },

    #[error("node counts differ: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },

    #[error("vector lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("cosine distance undefined for a zero-norm vector")]
    ZeroNorm,

    #[error("n = {n} exceeds the naive oracle cap of {cap}; use the contingency fast path")]
    OracleCap { n: usize, cap: usize },

    #[error("graph has no edges")]
    EmptyGraph,

    #[error("need at least {needed} nodes, got {n}")]
    TooFewNodes { needed: usize, n: usize },

    #[error("need at least two ground-truth communities, got {0}")]
    TooFewCommunities(usize),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParam { name: &'static str, reason: String },

    #[error("{stage} sampling failed after {attempts} attempts")]
    Sampling {
        stage: &'static str,
        attempts: usize,
    },

    #[error("unknown detector `{0}`")]
    UnknownDetector(String),

    #[error("{path}: {source}")]
    File {
        path: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParam {
            name,
            reason: reason.into(),
        }
    }

    /// True when the failure originates in the filesystem rather than in the
    /// content of an input.
    pub fn is_io(&self) -> bool {
        match self {
            Error::Io(_) => true,
            Error::File { source, .. } => source.is_io(),
            _ => false,
        }
    }
}
