use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("node index {index} out of range for graph on {num_nodes} nodes")]
    IndexOutOfRange { index: usize, num_nodes: usize },

    #[error("self loop on node {0} rejected")]
    SelfLoopRejected(usize),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error("invalid model specification: {0}")]
    InvalidSpec(String),

    #[error("argument outside the function domain: {0}")]
    Domain(String),

    #[error("both variances vanish and the means agree")]
    DegenerateVariance,

    #[error("degenerate graph: {0}")]
    DegenerateGraph(String),

    #[error("enumeration budget exceeded: {required} evaluations needed, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u128 },

    #[error("clique search budget exceeded; clique number lies in [{lower}, {upper}]")]
    TimeBudgetExceeded { lower: usize, upper: usize },

    #[error("invalid subset size {size} (valid range {min}..={max})")]
    InvalidSize { size: usize, min: usize, max: usize },

    #[error("graph has no edges")]
    EmptyGraph,

    #[error("quantile rank {rank} exceeds the {replicates} available replicates")]
    InsufficientReplicates { rank: usize, replicates: usize },

    #[error("component tests were calibrated under different null models")]
    MismatchedNullSpec,

    #[error("inconsistent null/alternative pair: {0}")]
    InvalidSpecPair(String),
}

impl Error {
    /// Stable variant name, used in machine-readable error reports.
    pub fn name(&self) -> &'static str {
        match self {
            Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            Error::SelfLoopRejected(_) => "SelfLoopRejected",
            Error::Parse { .. } => "ParseError",
            Error::Io(_) => "IoError",
            Error::InvalidSpec(_) => "InvalidSpec",
            Error::Domain(_) => "DomainError",
            Error::DegenerateVariance => "DegenerateVariance",
            Error::DegenerateGraph(_) => "DegenerateGraph",
            Error::BudgetExceeded { .. } => "BudgetExceeded",
            Error::TimeBudgetExceeded { .. } => "TimeBudgetExceeded",
            Error::InvalidSize { .. } => "InvalidSize",
            Error::EmptyGraph => "EmptyGraph",
            Error::InsufficientReplicates { .. } => "InsufficientReplicates",
            Error::MismatchedNullSpec => "MismatchedNullSpec",
            Error::InvalidSpecPair(_) => "InvalidSpecPair",
        }
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
