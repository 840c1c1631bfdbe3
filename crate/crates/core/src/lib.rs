//! Maximal safe sequences for path covers of s-t DAGs.
//!
//! A sequence of nodes (or arcs) is *safe* when every path cover of the
//! graph has a path containing it, in order. This crate enumerates all
//! maximal safe sequences from the leaves shared by the source- and
//! sink-dominator trees of the compressed graph, in time proportional to the
//! graph size plus the output size, together with the subset-cover and
//! arc-cover variants. The sequences are then used to fix binary variables
//! of path-covering ILPs (MinPathError, LeastSquares).

pub mod antichain;
pub mod dominators;
pub mod error;
pub mod format;
pub mod graph;
pub mod ilp;
pub mod safety;

pub use error::{Error, Result};
pub use graph::{ArcId, DiGraph, NodeId, StDag};

/// Default cap on enumerated paths for the brute-force oracles.
pub const DEFAULT_PATH_LIMIT: u128 = 100_000;
