use thiserror::Error;

use crate::graph::{ArcId, NodeId};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("graph contains a cycle through node {node}")]
    CycleDetected { node: NodeId },
    #[error("node {node} has indegree 0 but is not the source")]
    MultipleSources { node: NodeId },
    #[error("node {node} has outdegree 0 but is not the sink")]
    MultipleSinks { node: NodeId },
    #[error("node {node} does not lie on any source-sink path")]
    UnreachableNode { node: NodeId },
    #[error("node {node} is out of range for a graph with {node_count} nodes")]
    NodeOutOfRange { node: NodeId, node_count: usize },
    #[error("arc {arc} is out of range for a graph with {arc_count} arcs")]
    ArcOutOfRange { arc: ArcId, arc_count: usize },
    #[error("start and end node sets must be nonempty")]
    EmptyTerminals,
    #[error("no path from {from} to {to}")]
    NoPath { from: NodeId, to: NodeId },
    #[error("path enumeration exceeds the limit of {limit}")]
    PathExplosion { limit: u128 },
    #[error("no feasible flow satisfies the lower bounds")]
    Infeasible,
    #[error("number of paths must be at least 1, got {k}")]
    InvalidK { k: usize },
    #[error("{sequences} fixing sequences do not fit into {k} paths")]
    TooManySequences { sequences: usize, k: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("percentile {q} is outside [0, 100]")]
    InvalidPercentile { q: f64 },
}
