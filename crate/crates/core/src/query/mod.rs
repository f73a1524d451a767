//! SPARQL basic graph pattern queries: graphs, the `SELECT * WHERE { ... }`
//! parser, workloads and constant-removal normalization.

mod graph;
mod normalize;
mod parser;

use thiserror::Error;

pub use graph::{EdgeLabel, QEdge, QVertex, QueryGraph, TriplePattern, Workload};
pub use normalize::normalize;
pub use parser::{parse_query, parse_workload, serialize_workload};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("syntax error at byte {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("FILTER at byte {pos} is not supported")]
    Filter { pos: usize },
    #[error("query has no triple patterns")]
    Empty,
    #[error("query has {0} connected components; expected one")]
    Disconnected(usize),
    #[error("literal {0} in subject position")]
    LiteralSubject(String),
    #[error("empty property label")]
    EmptyProperty,
    #[error("variable {0} used both as a vertex and as a property")]
    VariableRoleConflict(String),
    #[error("query block starting at line {line}: {source}")]
    InBlock {
        line: usize,
        #[source]
        source: Box<QueryError>,
    },
}
