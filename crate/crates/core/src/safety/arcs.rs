//! Safe arc sequences for arc path covers, computed with the node machinery
//! on the augmented line graph.

use std::cmp::Ordering;

use serde::Serialize;

use crate::dominators::{build_dominator_tree, Direction, DominatorTree};
use crate::error::{Error, Result};
use crate::graph::{
    all_st_arc_paths, compress_arcs, line_graph, reaches_avoiding_arc, ArcId, LineGraph, StDag,
};

use super::nodes::witness_exists;
use super::{keep_maximal, maximal_safe_sequences, maximal_safe_sequences_subset};

/// A safe arc sequence over the original graph, with the arc whose
/// extension produced it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ArcSafeSequence {
    pub anchor: ArcId,
    pub arcs: Vec<ArcId>,
}

/// All maximal safe arc sequences, without duplicates.
pub fn maximal_safe_arc_sequences(g: &StDag) -> Vec<ArcSafeSequence> {
    let (compressed, cmap) = compress_arcs(g);
    let lg = line_graph(&compressed);
    let set = maximal_safe_sequences(&lg.dag);
    let mut out: Vec<ArcSafeSequence> = set
        .sequences
        .iter()
        .map(|seq| {
            let anchor = match &set.representation {
                Some(rep) => rep.map.expand[rep.map.forward[seq.anchor]]
                    .iter()
                    .copied()
                    .find(|&v| !lg.is_abstract(v))
                    .expect("a compressed line node holds at least one arc"),
                None => lg.strip(&seq.nodes)[0],
            };
            ArcSafeSequence {
                anchor: cmap.expand[anchor][0],
                arcs: cmap.expand_sequence(&lg.strip(&seq.nodes)),
            }
        })
        .collect();
    sort_arc_sequences(g, &mut out);
    out
}

/// Arc-dominator trees: the node-dominator trees of the augmented line
/// graph.
#[derive(Debug, Clone, PartialEq)]
pub struct ArcDominatorTrees {
    pub line: LineGraph,
    pub s_tree: DominatorTree,
    pub t_tree: DominatorTree,
}

impl ArcDominatorTrees {
    /// Whether `arc` strictly dominates another arc in the given tree.
    /// The abstract endpoints do not count as arcs.
    pub fn dominates_some_arc(&self, arc: ArcId, direction: Direction) -> bool {
        let tree = match direction {
            Direction::TowardS => &self.s_tree,
            Direction::TowardT => &self.t_tree,
        };
        tree.children(arc).iter().any(|&c| !self.line.is_abstract(c))
    }
}

pub fn arc_dominator_trees(g: &StDag) -> ArcDominatorTrees {
    let line = line_graph(g);
    let s_tree = build_dominator_tree(&line.dag, Direction::TowardS);
    let t_tree = build_dominator_tree(&line.dag, Direction::TowardT);
    ArcDominatorTrees {
        line,
        s_tree,
        t_tree,
    }
}

/// Whether `arc = uv` strictly dominates another arc, from degrees alone.
/// Toward `s`: `v` has one incoming and at least one outgoing arc. Toward
/// `t`: `u` has one outgoing and at least one incoming arc.
pub fn is_arc_dominator(g: &StDag, arc: ArcId, direction: Direction) -> bool {
    let a = g.arc(arc);
    match direction {
        Direction::TowardS => g.in_arcs(a.head).len() == 1 && !g.out_arcs(a.head).is_empty(),
        Direction::TowardT => g.out_arcs(a.tail).len() == 1 && !g.in_arcs(a.tail).is_empty(),
    }
}

/// Maximal safe arc sequences for covers of the arcs in `c`. Empty `c`
/// gives the empty list.
pub fn maximal_safe_arc_sequences_subset(g: &StDag, c: &[ArcId]) -> Result<Vec<ArcSafeSequence>> {
    if let Some(&arc) = c.iter().find(|&&a| a >= g.arc_count()) {
        return Err(Error::ArcOutOfRange {
            arc,
            arc_count: g.arc_count(),
        });
    }
    let lg = line_graph(g);
    let set = maximal_safe_sequences_subset(&lg.dag, c)?;
    let mut out: Vec<ArcSafeSequence> = set
        .sequences
        .into_iter()
        .map(|seq| ArcSafeSequence {
            anchor: seq.anchor,
            arcs: lg.strip(&seq.nodes),
        })
        .collect();
    sort_arc_sequences(g, &mut out);
    Ok(out)
}

/// The `u`-`v` bridges in path order: arcs whose removal leaves no `u`-`v`
/// path.
fn bridges_bruteforce(g: &StDag, u: usize, v: usize) -> Vec<ArcId> {
    let from_u = g.reach_from(u, None, None);
    let to_v = g.reach_to(v);
    let mut out: Vec<ArcId> = (0..g.arc_count())
        .filter(|&a| from_u[g.arc(a).tail] && to_v[g.arc(a).head])
        .filter(|&a| !reaches_avoiding_arc(g, u, v, a))
        .collect();
    out.sort_by(|&a, &b| compare_arcs(g, a, b));
    out
}

/// `s`-`x` bridges, then `xy`, then `y`-`t` bridges.
pub fn arc_extension_bruteforce(g: &StDag, arc: ArcId) -> Vec<ArcId> {
    let a = g.arc(arc);
    let mut seq = bridges_bruteforce(g, g.source(), a.tail);
    seq.push(arc);
    seq.extend(bridges_bruteforce(g, a.head, g.sink()));
    seq
}

/// Maximal elements among the brute-force extensions of every arc.
pub fn oracle_maximal_safe_arcs(g: &StDag) -> Vec<ArcSafeSequence> {
    let all: Vec<ArcId> = (0..g.arc_count()).collect();
    oracle_maximal_safe_arcs_subset(g, &all)
}

/// Maximal elements among the brute-force extensions of the arcs in `c`.
pub fn oracle_maximal_safe_arcs_subset(g: &StDag, c: &[ArcId]) -> Vec<ArcSafeSequence> {
    let exts: Vec<(ArcId, Vec<ArcId>)> = c
        .iter()
        .map(|&a| (a, arc_extension_bruteforce(g, a)))
        .collect();
    let maximal = keep_maximal(exts.iter().map(|(_, e)| e.clone()).collect());
    let mut out: Vec<ArcSafeSequence> = maximal
        .into_iter()
        .map(|arcs| ArcSafeSequence {
            anchor: exts.iter().find(|(_, e)| *e == arcs).expect("from exts").0,
            arcs,
        })
        .collect();
    sort_arc_sequences(g, &mut out);
    out
}

/// Whether some arc `e` has every s-t path through `e` containing the arcs
/// of `x` in order. Enumerates all s-t paths.
pub fn oracle_is_safe_arcs(g: &StDag, x: &[ArcId], limit: u128) -> Result<bool> {
    let paths = all_st_arc_paths(g, limit)?;
    Ok(witness_exists(&paths, 0..g.arc_count(), x))
}

fn compare_arcs(g: &StDag, a: ArcId, b: ArcId) -> Ordering {
    let key = |e: ArcId| (g.rank(g.arc(e).tail), g.rank(g.arc(e).head), e);
    key(a).cmp(&key(b))
}

fn sort_arc_sequences(g: &StDag, seqs: &mut [ArcSafeSequence]) {
    seqs.sort_by(|x, y| {
        x.arcs
            .iter()
            .zip(&y.arcs)
            .map(|(&a, &b)| compare_arcs(g, a, b))
            .find(|o| o.is_ne())
            .unwrap_or_else(|| x.arcs.len().cmp(&y.arcs.len()))
    });
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{validate_st_dag, DiGraph};

    fn dag(n: usize, arcs: &[(usize, usize)]) -> StDag {
        validate_st_dag(DiGraph::from_pairs(n, arcs.iter().copied()).unwrap(), 0, n - 1).unwrap()
    }

    fn arc_lists(seqs: &[ArcSafeSequence]) -> Vec<Vec<ArcId>> {
        seqs.iter().map(|s| s.arcs.clone()).collect()
    }

    #[test]
    fn path_and_diamond() {
        let p = dag(3, &[(0, 1), (1, 2)]);
        assert_eq!(arc_lists(&maximal_safe_arc_sequences(&p)), vec![vec![0, 1]]);
        assert_eq!(arc_lists(&oracle_maximal_safe_arcs(&p)), vec![vec![0, 1]]);
        let d = dag(4, &[(0, 1), (0, 2), (1, 3), (2, 3)]);
        let expected = vec![vec![0, 2], vec![1, 3]];
        assert_eq!(arc_lists(&maximal_safe_arc_sequences(&d)), expected);
        assert_eq!(arc_lists(&oracle_maximal_safe_arcs(&d)), expected);
        assert_eq!(arc_lists(&maximal_safe_arc_sequences_subset(&d, &[0]).unwrap()), vec![vec![0, 2]]);
        assert_eq!(arc_lists(&maximal_safe_arc_sequences_subset(&d, &[0, 1, 2, 3]).unwrap()), expected);
        assert!(maximal_safe_arc_sequences_subset(&d, &[]).unwrap().is_empty());
    }

    #[test]
    fn parallel_arcs() {
        let g = dag(2, &[(0, 1), (0, 1)]);
        let expected = vec![vec![0], vec![1]];
        assert_eq!(arc_lists(&maximal_safe_arc_sequences(&g)), expected);
        assert_eq!(arc_lists(&oracle_maximal_safe_arcs(&g)), expected);
        assert!(oracle_is_safe_arcs(&g, &[0], 10).unwrap());
        assert!(!oracle_is_safe_arcs(&g, &[0, 1], 10).unwrap());
    }

    #[test]
    fn dominator_by_degree() {
        let p = dag(3, &[(0, 1), (1, 2)]);
        assert!(is_arc_dominator(&p, 0, Direction::TowardS));
        assert!(!is_arc_dominator(&p, 1, Direction::TowardS));
        assert!(is_arc_dominator(&p, 1, Direction::TowardT));
        let trees = arc_dominator_trees(&p);
        assert!(trees.dominates_some_arc(0, Direction::TowardS));
        assert!(!trees.dominates_some_arc(1, Direction::TowardS));
    }

    #[test]
    fn anchors_are_arcs_of_the_sequence() {
        let g = dag(5, &[(0, 1), (1, 2), (2, 4), (0, 3), (3, 4), (1, 3)]);
        for s in maximal_safe_arc_sequences(&g) {
            assert!(s.arcs.contains(&s.anchor));
        }
        assert_eq!(
            arc_lists(&maximal_safe_arc_sequences(&g)),
            arc_lists(&oracle_maximal_safe_arcs(&g))
        );
    }

    #[test]
    fn out_of_range_subset() {
        let g = dag(2, &[(0, 1)]);
        assert!(matches!(
            maximal_safe_arc_sequences_subset(&g, &[3]),
            Err(Error::ArcOutOfRange { arc: 3, .. })
        ));
    }
}
