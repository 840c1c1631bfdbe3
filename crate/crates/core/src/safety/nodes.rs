use crate::dominators::{
    build_dominator_tree, extension, extension_bruteforce, is_dominator_by_neighborhood,
    Direction,
};
use crate::error::Result;
use crate::graph::{all_st_paths, compress_nodes, NodeId, StDag};

use super::{
    forced_arcs, is_subsequence, keep_maximal, sort_by_topo, Representation, SafeSequence,
    SafeSequenceSet,
};

/// All maximal safe node sequences, without duplicates.
///
/// The graph is compressed, both dominator trees of the compressed graph are
/// built, and every node that is a leaf in both trees contributes its
/// extension, expanded back through the compression map.
pub fn maximal_safe_sequences(g: &StDag) -> SafeSequenceSet {
    let (compressed, map) = compress_nodes(g);
    if compressed.node_count() == 1 {
        return single_path(g, map.expand[0].clone());
    }
    let s_tree = build_dominator_tree(&compressed, Direction::TowardS);
    let t_tree = build_dominator_tree(&compressed, Direction::TowardT);
    let common_leaves: Vec<NodeId> = compressed
        .topo_order()
        .iter()
        .copied()
        .filter(|&v| s_tree.is_leaf(v) && t_tree.is_leaf(v))
        .collect();
    let mut sequences: Vec<SafeSequence> = common_leaves
        .iter()
        .map(|&leaf| SafeSequence {
            anchor: map.expand[leaf][0],
            nodes: map.expand_sequence(&extension(&s_tree, &t_tree, leaf).sequence),
        })
        .collect();
    sort_by_topo(g, &mut sequences);
    SafeSequenceSet {
        sequences,
        representation: Some(Box::new(Representation {
            compressed,
            map,
            s_tree,
            t_tree,
            common_leaves,
        })),
    }
}

fn single_path(g: &StDag, nodes: Vec<NodeId>) -> SafeSequenceSet {
    debug_assert_eq!(nodes.len(), g.node_count());
    SafeSequenceSet {
        sequences: vec![SafeSequence {
            anchor: g.source(),
            nodes,
        }],
        representation: None,
    }
}

/// The same output without dominator trees: on the compressed graph, a node
/// is a leaf of both trees exactly when it is nobody's unique in-neighbor
/// and nobody's unique out-neighbor. Extensions come from brute-force
/// cutnodes, so this runs in O(nm) per selected node.
pub fn maximal_safe_sequences_no_domtree(g: &StDag) -> SafeSequenceSet {
    let (compressed, map) = compress_nodes(g);
    if compressed.node_count() == 1 {
        return single_path(g, map.expand[0].clone());
    }
    let mut sequences: Vec<SafeSequence> = compressed
        .topo_order()
        .iter()
        .copied()
        .filter(|&v| {
            !is_dominator_by_neighborhood(&compressed, v, Direction::TowardS)
                && !is_dominator_by_neighborhood(&compressed, v, Direction::TowardT)
        })
        .map(|v| SafeSequence {
            anchor: map.expand[v][0],
            nodes: map.expand_sequence(&extension_bruteforce(&compressed, v)),
        })
        .collect();
    sort_by_topo(g, &mut sequences);
    SafeSequenceSet {
        sequences,
        representation: None,
    }
}

/// Whether some node `u` has every s-t path through `u` containing `x` in
/// order. Enumerates all s-t paths.
pub fn oracle_is_safe(g: &StDag, x: &[NodeId], limit: u128) -> Result<bool> {
    let paths = all_st_paths(g, limit)?;
    Ok(witness_exists(&paths, 0..g.node_count(), x))
}

pub(crate) fn witness_exists(
    paths: &[Vec<NodeId>],
    candidates: impl IntoIterator<Item = NodeId>,
    x: &[NodeId],
) -> bool {
    candidates.into_iter().any(|u| {
        let mut through_u = paths.iter().filter(|p| p.contains(&u)).peekable();
        through_u.peek().is_some() && through_u.all(|p| is_subsequence(x, p))
    })
}

/// Extensions of every node from brute-force cutnodes, with duplicates and
/// non-maximal sequences removed.
pub fn oracle_maximal_safe(g: &StDag) -> SafeSequenceSet {
    let exts: Vec<Vec<NodeId>> = (0..g.node_count())
        .map(|v| extension_bruteforce(g, v))
        .collect();
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

/// For every arc, the length of the longest maximal safe sequence whose
/// consecutive nodes force that arc, and the index of that sequence in
/// `set` (first one on ties). Arcs on no sequence get `(0, None)`.
pub fn longest_safe_sequence_per_arc(
    g: &StDag,
    set: &SafeSequenceSet,
) -> Vec<(usize, Option<usize>)> {
    let mut best = vec![(0, None); g.arc_count()];
    for (i, seq) in set.sequences.iter().enumerate() {
        let len = seq.nodes.len();
        for a in forced_arcs(g, &seq.nodes) {
            if len > best[a].0 {
                best[a] = (len, Some(i));
            }
        }
    }
    best
}
