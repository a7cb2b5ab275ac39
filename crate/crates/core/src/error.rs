use std::fmt;

use thiserror::Error;

use crate::engine::RunStats;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed weight {0:?}: expected a decimal with at most 3 fractional digits")]
    MalformedWeight(String),
    #[error("non-positive weight {0:?}")]
    NonPositiveWeight(String),
    #[error("malformed graph document: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("no nodes")]
    NoNodes,
    #[error("invalid graph: {}", render_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("keyword not found: {0}")]
    KeywordNotFound(String),
    #[error("query must have at least two keywords")]
    TooFewKeywords,
    #[error("not a keyword: {0}")]
    NotAKeyword(String),
    #[error("no such edge: {0} -> {1}")]
    NoSuchEdge(String, String),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("queue cap of {cap} entries exceeded after {} pops", .stats.pops)]
    QueueCapExceeded { cap: usize, stats: Box<RunStats> },
    #[error("oracle size guard exceeded: {nodes} nodes > limit {limit}")]
    OracleTooLarge { nodes: usize, limit: usize },
    #[error("at least one sample is required")]
    EmptySamples,
    #[error("baseline time must be positive")]
    NonPositiveTime,
    #[error("invalid generator spec {0:?}")]
    InvalidGenerator(String),
    #[error("invalid queries file: {0}")]
    InvalidQueries(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// One structural problem found while validating a graph document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    DuplicateNode(String),
    DanglingEdge { src: String, dst: String, missing: String },
    DuplicateEdge { src: String, dst: String },
    NonPositiveWeight { element: String, weight: String },
    MalformedWeight { element: String, weight: String },
    KeywordHasOutgoingEdge { keyword: String, dst: String },
    ReservedId(String),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateNode(id) => write!(f, "duplicate node id {id}"),
            Violation::DanglingEdge { src, dst, missing } => {
                write!(f, "dangling edge {src} -> {dst}: unknown node {missing}")
            }
            Violation::DuplicateEdge { src, dst } => write!(f, "duplicate edge {src} -> {dst}"),
            Violation::NonPositiveWeight { element, weight } => {
                write!(f, "non-positive weight {weight:?} on {element}")
            }
            Violation::MalformedWeight { element, weight } => {
                write!(f, "malformed weight {weight:?} on {element}")
            }
            Violation::KeywordHasOutgoingEdge { keyword, dst } => {
                write!(f, "keyword node {keyword} has outgoing edge to {dst}")
            }
            Violation::ReservedId(id) => {
                write!(f, "node id {id} uses the reserved kw: prefix but is not a keyword")
            }
        }
    }
}

fn render_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}
