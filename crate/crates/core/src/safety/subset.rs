//! Safe sequences for path covers that only need to cover a node subset `C`.
//!
//! Both dominator trees are overlaid with "blue" arcs joining each node of
//! `C` to its nearest strict ancestor in `C`. A maximal safe sequence is the
//! extension of any node on a blue path that is univocal (every node but the
//! deepest has exactly one blue child) in both blue forests with the same
//! node set, and whose deepest node in each forest has no blue child.

use crate::dominators::{build_dominator_tree, extension, extension_bruteforce, DominatorTree, Direction};
use crate::error::{Error, Result};
use crate::graph::{all_st_paths, NodeId, StDag};

use super::nodes::witness_exists;
use super::{keep_maximal, sort_by_topo, SafeSequence, SafeSequenceSet};

/// A dominator tree with the dominance relation restricted to `C`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlueTree {
    pub base: DominatorTree,
    /// Nearest strict ancestor in `C`, for nodes in `C`; `None` for blue
    /// forest roots and for nodes outside `C`.
    pub blue_parent: Vec<Option<NodeId>>,
    pub blue_children: Vec<usize>,
    pub in_c: Vec<bool>,
}

impl BlueTree {
    pub fn new(base: DominatorTree, in_c: Vec<bool>) -> Self {
        let n = base.node_count();
        let mut nearest: Vec<Option<NodeId>> = vec![None; n];
        let mut blue_parent = vec![None; n];
        let mut blue_children = vec![0; n];
        for &v in base.preorder() {
            if let Some(p) = base.idom(v) {
                nearest[v] = if in_c[p] { Some(p) } else { nearest[p] };
            }
            if in_c[v] {
                blue_parent[v] = nearest[v];
                if let Some(p) = nearest[v] {
                    blue_children[p] += 1;
                }
            }
        }
        BlueTree {
            base,
            blue_parent,
            blue_children,
            in_c,
        }
    }

    /// A node of `C` with no descendant in `C`.
    pub fn is_blue_leaf(&self, v: NodeId) -> bool {
        self.in_c[v] && self.blue_children[v] == 0
    }

    /// `v` followed by its blue ancestors as long as each has exactly one
    /// blue child.
    fn univocal_chain(&self, v: NodeId) -> Vec<NodeId> {
        let mut chain = vec![v];
        let mut x = v;
        while let Some(p) = self.blue_parent[x] {
            if self.blue_children[p] != 1 {
                break;
            }
            chain.push(p);
            x = p;
        }
        chain
    }
}

/// Blue path univocal in both forests, ordered as in the source tree
/// (shallowest first).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnivocalBluePath {
    pub nodes: Vec<NodeId>,
}

impl UnivocalBluePath {
    /// Deepest node in the source forest; its extension is the path's
    /// sequence.
    pub fn representative(&self) -> NodeId {
        *self.nodes.last().expect("paths are nonempty")
    }
}

/// Both blue trees and the common univocal paths that identify the maximal
/// safe sequences.
#[derive(Debug, Clone, PartialEq)]
pub struct SubsetRepresentation {
    pub s_blue: BlueTree,
    pub t_blue: BlueTree,
    pub paths: Vec<UnivocalBluePath>,
}

impl SubsetRepresentation {
    pub fn new(g: &StDag, c: &[NodeId]) -> Result<Self> {
        let n = g.node_count();
        let mut in_c = vec![false; n];
        for &v in c {
            if v >= n {
                return Err(Error::NodeOutOfRange { node: v, node_count: n });
            }
            in_c[v] = true;
        }
        let s_blue = BlueTree::new(build_dominator_tree(g, Direction::TowardS), in_c.clone());
        let t_blue = BlueTree::new(build_dominator_tree(g, Direction::TowardT), in_c);
        let mut paths = Vec::new();
        for &leaf in g.topo_order() {
            if !s_blue.is_blue_leaf(leaf) {
                continue;
            }
            let s_chain = s_blue.univocal_chain(leaf);
            // The common path, if any, ends at the first blue leaf of the
            // sink forest met while walking up from `leaf`.
            let Some(top) = s_chain.iter().position(|&x| t_blue.is_blue_leaf(x)) else {
                continue;
            };
            let t_chain = t_blue.univocal_chain(s_chain[top]);
            if t_chain.len() <= top {
                continue;
            }
            if t_chain[..=top].iter().eq(s_chain[..=top].iter().rev()) {
                paths.push(UnivocalBluePath {
                    nodes: t_chain[..=top].to_vec(),
                });
            }
        }
        Ok(SubsetRepresentation {
            s_blue,
            t_blue,
            paths,
        })
    }

    pub fn sequence_of(&self, path: &UnivocalBluePath) -> Vec<NodeId> {
        extension(&self.s_blue.base, &self.t_blue.base, path.representative()).sequence
    }
}

/// All maximal safe sequences for path covers of the nodes in `c`, without
/// duplicates. Empty `c` gives the empty set.
pub fn maximal_safe_sequences_subset(g: &StDag, c: &[NodeId]) -> Result<SafeSequenceSet> {
    if c.is_empty() {
        return Ok(SafeSequenceSet::default());
    }
    let rep = SubsetRepresentation::new(g, c)?;
    let mut sequences: Vec<SafeSequence> = rep
        .paths
        .iter()
        .map(|p| SafeSequence {
            anchor: p.representative(),
            nodes: rep.sequence_of(p),
        })
        .collect();
    sort_by_topo(g, &mut sequences);
    Ok(SafeSequenceSet {
        sequences,
        representation: None,
    })
}

/// Whether some `u` in `c` has every s-t path through `u` containing `x`.
pub fn oracle_is_safe_subset(g: &StDag, c: &[NodeId], x: &[NodeId], limit: u128) -> Result<bool> {
    let paths = all_st_paths(g, limit)?;
    Ok(witness_exists(&paths, c.iter().copied(), x))
}

/// Maximal elements among the brute-force extensions of the nodes of `c`.
pub fn oracle_maximal_safe_subset(g: &StDag, c: &[NodeId]) -> SafeSequenceSet {
    let exts: Vec<Vec<NodeId>> = c.iter().map(|&v| extension_bruteforce(g, v)).collect();
    let mut sequences: Vec<SafeSequence> = keep_maximal(exts)
        .into_iter()
        .map(|nodes| SafeSequence {
            anchor: nodes[0],
            nodes,
        })
        .collect();
    sort_by_topo(g, &mut sequences);
    SafeSequenceSet {
        sequences,
        representation: None,
    }
}
