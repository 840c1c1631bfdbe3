//! Maximal safe sequences for node, subset and arc path covers.

mod arcs;
mod nodes;
mod subset;

use std::cmp::Ordering;
use std::fmt::Write as _;

use serde::Serialize;

use crate::dominators::DominatorTree;
use crate::graph::{reaches_avoiding_arc, ArcId, CompressionMap, NodeId, StDag};

pub use arcs::{
    arc_dominator_trees, is_arc_dominator, maximal_safe_arc_sequences,
    maximal_safe_arc_sequences_subset, arc_extension_bruteforce, oracle_is_safe_arcs,
    oracle_maximal_safe_arcs, oracle_maximal_safe_arcs_subset,
    ArcDominatorTrees, ArcSafeSequence,
};
pub use nodes::{
    longest_safe_sequence_per_arc, maximal_safe_sequences, maximal_safe_sequences_no_domtree,
    oracle_is_safe, oracle_maximal_safe,
};
pub use subset::{
    maximal_safe_sequences_subset, oracle_is_safe_subset, oracle_maximal_safe_subset, BlueTree,
    SubsetRepresentation, UnivocalBluePath,
};

/// A safe node sequence over the original graph, with the node whose
/// extension produced it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SafeSequence {
    pub anchor: NodeId,
    pub nodes: Vec<NodeId>,
}

/// The dominator trees of the compressed graph plus their common leaves.
/// Together with the compression map this encodes every maximal safe
/// sequence in space linear in the number of nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Representation {
    pub compressed: StDag,
    pub map: CompressionMap,
    pub s_tree: DominatorTree,
    pub t_tree: DominatorTree,
    pub common_leaves: Vec<NodeId>,
}

impl Representation {
    /// Expands the sequence identified by a common leaf of the compressed
    /// graph.
    pub fn sequence_of(&self, leaf: NodeId) -> Vec<NodeId> {
        let ext = crate::dominators::extension(&self.s_tree, &self.t_tree, leaf);
        self.map.expand_sequence(&ext.sequence)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SafeSequenceSet {
    pub sequences: Vec<SafeSequence>,
    pub representation: Option<Box<Representation>>,
}

impl SafeSequenceSet {
    pub fn len(&self) -> usize {
        self.sequences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequences.is_empty()
    }

    /// Total output length `o`.
    pub fn total_length(&self) -> usize {
        self.sequences.iter().map(|s| s.nodes.len()).sum()
    }

    pub fn node_lists(&self) -> Vec<Vec<NodeId>> {
        self.sequences.iter().map(|s| s.nodes.clone()).collect()
    }
}

/// Whether `x` occurs in `y` in order (not necessarily contiguously).
pub fn is_subsequence<T: PartialEq>(x: &[T], y: &[T]) -> bool {
    let mut it = y.iter();
    x.iter().all(|a| it.any(|b| b == a))
}

/// Sorts node sequences by their first differing node in topological order.
pub(crate) fn sort_by_topo(g: &StDag, seqs: &mut [SafeSequence]) {
    seqs.sort_by(|a, b| compare_by_rank(g, &a.nodes, &b.nodes));
}

pub(crate) fn compare_by_rank(g: &StDag, a: &[NodeId], b: &[NodeId]) -> Ordering {
    a.iter()
        .map(|&v| g.rank(v))
        .cmp(b.iter().map(|&v| g.rank(v)))
}

/// Drops duplicates and sequences that are proper subsequences of another.
/// Quadratic; meant for the oracles.
pub(crate) fn keep_maximal<T: PartialEq + Clone>(mut seqs: Vec<Vec<T>>) -> Vec<Vec<T>> {
    let mut unique: Vec<Vec<T>> = Vec::new();
    for s in seqs.drain(..) {
        if !unique.contains(&s) {
            unique.push(s);
        }
    }
    unique
        .iter()
        .filter(|x| {
            !unique
                .iter()
                .any(|y| y.len() > x.len() && is_subsequence(x, y))
        })
        .cloned()
        .collect()
}

/// Arcs that every path containing the node sequence must traverse: for each
/// pair of consecutive nodes `a, b`, the arc `ab` when it is the only arc
/// from `a` to `b` and no other `a`-`b` path exists.
pub fn forced_arcs(g: &StDag, nodes: &[NodeId]) -> Vec<ArcId> {
    let mut arcs = Vec::new();
    for pair in nodes.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let mut direct = g.out_arcs(a).iter().copied().filter(|&e| g.arc(e).head == b);
        let (Some(arc), None) = (direct.next(), direct.next()) else {
            continue;
        };
        if g.successors(a) == [b] || !reaches_avoiding_arc(g, a, b, arc) {
            arcs.push(arc);
        }
    }
    arcs
}

/// `graph_id \t seq_index \t space-separated nodes`, one line per sequence.
pub fn node_sequences_tsv(graph_id: &str, seqs: &[Vec<NodeId>]) -> String {
    let mut out = String::new();
    for (i, s) in seqs.iter().enumerate() {
        let nodes: Vec<String> = s.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(out, "{}\t{}\t{}", graph_id, i, nodes.join(" "));
    }
    out
}

/// `graph_id \t seq_index \t tail:head:arcid ...`, one line per sequence.
pub fn arc_sequences_tsv(g: &StDag, graph_id: &str, seqs: &[Vec<ArcId>]) -> String {
    let mut out = String::new();
    for (i, s) in seqs.iter().enumerate() {
        let arcs: Vec<String> = s
            .iter()
            .map(|&a| format!("{}:{}:{}", g.arc(a).tail, g.arc(a).head, a))
            .collect();
        let _ = writeln!(out, "{}\t{}\t{}", graph_id, i, arcs.join(" "));
    }
    out
}

#[derive(Serialize)]
struct JsonSequences<'a, T: Serialize> {
    graph: &'a str,
    kind: &'a str,
    sequences: &'a [Vec<T>],
}

/// `{"graph": id, "kind": "nodes", "sequences": [[...], ...]}`.
pub fn node_sequences_json(graph_id: &str, seqs: &[Vec<NodeId>]) -> String {
    serde_json::to_string(&JsonSequences {
        graph: graph_id,
        kind: "nodes",
        sequences: seqs,
    })
    .expect("plain data serializes")
}

/// Same shape as [`node_sequences_json`] with arc ids and `"kind": "arcs"`.
pub fn arc_sequences_json(graph_id: &str, seqs: &[Vec<ArcId>]) -> String {
    serde_json::to_string(&JsonSequences {
        graph: graph_id,
        kind: "arcs",
        sequences: seqs,
    })
    .expect("plain data serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subsequence() {
        assert!(is_subsequence(&[1, 3], &[1, 2, 3]));
        assert!(!is_subsequence(&[3, 1], &[1, 2, 3]));
        assert!(is_subsequence::<u8>(&[], &[]));
    }

    #[test]
    fn maximal_filter() {
        let got = keep_maximal(vec![vec![0, 3], vec![0, 1, 3], vec![0, 1, 3], vec![0, 2, 3]]);
        assert_eq!(got, vec![vec![0, 1, 3], vec![0, 2, 3]]);
    }

    #[test]
    fn tsv_and_json() {
        let seqs = vec![vec![0, 1, 3], vec![0, 2, 3]];
        assert_eq!(node_sequences_tsv("g", &seqs), "g\t0\t0 1 3\ng\t1\t0 2 3\n");
        assert_eq!(
            node_sequences_json("g", &seqs),
            r#"{"graph":"g","kind":"nodes","sequences":[[0,1,3],[0,2,3]]}"#
        );
    }
}
