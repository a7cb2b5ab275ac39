//! Keyword search over weighted directed data graphs.
//!
//! Answers are rooted subtrees whose leaves are exactly the query keywords
//! and whose root has at least two children. [`gtf::run_gtf`] enumerates
//! them by nondecreasing height, freezing non-minimal paths until they can
//! contribute to an answer. [`naive::run_naive`] is the freezing-free
//! baseline and [`oracle`] holds brute-force ground truth for small graphs.

pub mod analysis;
pub mod answer;
pub mod bench;
pub mod cli;
pub mod datagraph;
pub mod engine;
pub mod error;
pub mod fixtures;
pub mod generate;
pub mod gtf;
pub mod naive;
pub mod oracle;
pub mod pathstore;
pub mod report;
pub mod weight;

pub use answer::Answer;
pub use datagraph::{DataGraph, GraphDocument, KeywordConfig, NodeId, Query};
pub use engine::{EngineKind, EngineOptions, RunStats};
pub use error::{Error, Result};
pub use gtf::{run_gtf, GtfSearch};
pub use naive::{run_naive, NaiveSearch};
pub use weight::Weight;
