//! Source- and sink-dominator trees of s-t DAGs.
//!
//! On a DAG the immediate dominator of `v` is the nearest common ancestor,
//! in the partially built tree, of all in-neighbors of `v`, so one pass in
//! topological order suffices. The sink tree is the same pass over the
//! reversed graph.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{NodeId, StDag};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Direction {
    /// Dominance with respect to paths from the source.
    TowardS,
    /// Dominance with respect to paths into the sink.
    TowardT,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DominatorTree {
    direction: Direction,
    root: NodeId,
    /// `parent[root] == root`.
    parent: Vec<NodeId>,
    depth: Vec<usize>,
    children: Vec<Vec<NodeId>>,
    pre: Vec<usize>,
    post: Vec<usize>,
    preorder: Vec<NodeId>,
}

pub fn build_dominator_tree(g: &StDag, direction: Direction) -> DominatorTree {
    let n = g.node_count();
    let (root, order): (NodeId, Vec<NodeId>) = match direction {
        Direction::TowardS => (g.source(), g.topo_order().to_vec()),
        Direction::TowardT => (g.sink(), g.topo_order().iter().rev().copied().collect()),
    };
    let mut position = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        position[v] = i;
    }
    let mut parent = vec![usize::MAX; n];
    let mut depth = vec![0; n];
    parent[root] = root;
    for &v in &order {
        if v == root {
            continue;
        }
        let preds = match direction {
            Direction::TowardS => g.predecessors(v),
            Direction::TowardT => g.successors(v),
        };
        let mut idom = preds[0];
        for &p in &preds[1..] {
            let (mut a, mut b) = (idom, p);
            while a != b {
                while position[a] > position[b] {
                    a = parent[a];
                }
                while position[b] > position[a] {
                    b = parent[b];
                }
            }
            idom = a;
        }
        parent[v] = idom;
        depth[v] = depth[idom] + 1;
    }
    let mut children = vec![Vec::new(); n];
    for &v in &order {
        if v != root {
            children[parent[v]].push(v);
        }
    }
    let mut pre = vec![0; n];
    let mut post = vec![0; n];
    let mut preorder = Vec::with_capacity(n);
    let mut clock = 0;
    let mut stack = vec![(root, 0usize)];
    pre[root] = clock;
    preorder.push(root);
    clock += 1;
    while let Some(&mut (v, ref mut next)) = stack.last_mut() {
        if let Some(&c) = children[v].get(*next) {
            *next += 1;
            pre[c] = clock;
            preorder.push(c);
            clock += 1;
            stack.push((c, 0));
        } else {
            post[v] = clock;
            clock += 1;
            stack.pop();
        }
    }
    let tree = DominatorTree {
        direction,
        root,
        parent,
        depth,
        children,
        pre,
        post,
        preorder,
    };
    let opposite = match direction {
        Direction::TowardS => g.sink(),
        Direction::TowardT => g.source(),
    };
    assert!(
        n == 1 || tree.is_leaf(opposite),
        "the opposite terminal dominates nothing"
    );
    tree
}

impl DominatorTree {
    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn node_count(&self) -> usize {
        self.parent.len()
    }

    /// Immediate dominator, `None` for the root.
    pub fn idom(&self, v: NodeId) -> Option<NodeId> {
        (v != self.root).then(|| self.parent[v])
    }

    pub fn parent_array(&self) -> &[NodeId] {
        &self.parent
    }

    pub fn depth(&self, v: NodeId) -> usize {
        self.depth[v]
    }

    pub fn children(&self, v: NodeId) -> &[NodeId] {
        &self.children[v]
    }

    pub fn is_leaf(&self, v: NodeId) -> bool {
        self.children[v].is_empty()
    }

    /// Nodes in tree preorder (parents before children).
    pub fn preorder(&self) -> &[NodeId] {
        &self.preorder
    }

    /// Whether `u` dominates `v` (reflexive).
    pub fn is_ancestor(&self, u: NodeId, v: NodeId) -> bool {
        self.pre[u] <= self.pre[v] && self.post[v] <= self.post[u]
    }

    /// The `k`-th strict ancestor of `v`, or the root when `v` has fewer than
    /// `k` strict ancestors.
    pub fn dom_k(&self, v: NodeId, k: usize) -> NodeId {
        assert!(k >= 1, "k must be positive");
        if k >= self.depth[v] {
            return self.root;
        }
        (0..k).fold(v, |x, _| self.parent[x])
    }

    /// `v, idom(v), ..., root`.
    pub fn path_to_root(&self, v: NodeId) -> Vec<NodeId> {
        let mut path = Vec::with_capacity(self.depth[v] + 1);
        let mut x = v;
        path.push(x);
        while x != self.root {
            x = self.parent[x];
            path.push(x);
        }
        path
    }

    /// Indented dump, one node per line, children in order.
    pub fn to_indented_text(&self, label: impl Fn(NodeId) -> String) -> String {
        let mut out = String::new();
        for &v in &self.preorder {
            let _ = writeln!(out, "{}{}", "  ".repeat(self.depth[v]), label(v));
        }
        out
    }

    /// DOT digraph with one `parent -> child` line per tree arc.
    pub fn to_dot(&self, label: impl Fn(NodeId) -> String) -> String {
        let name = match self.direction {
            Direction::TowardS => "s_dominator_tree",
            Direction::TowardT => "t_dominator_tree",
        };
        let mut out = format!("digraph {} {{\n", name);
        for &v in &self.preorder {
            for &c in &self.children[v] {
                let _ = writeln!(out, "  \"{}\" -> \"{}\";", label(v), label(c));
            }
        }
        out.push_str("}\n");
        out
    }
}

/// All `u`-`v` cutnodes (including `u` and `v`) in topological order,
/// found by deleting each candidate and re-checking reachability.
pub fn cutnodes_bruteforce(g: &StDag, u: NodeId, v: NodeId) -> Result<Vec<NodeId>> {
    let from_u = g.reach_from(u, None, None);
    if !from_u[v] {
        return Err(Error::NoPath { from: u, to: v });
    }
    let to_v = g.reach_to(v);
    let mut cut: Vec<NodeId> = g
        .topo_order()
        .iter()
        .copied()
        .filter(|&x| from_u[x] && to_v[x])
        .filter(|&x| x == u || x == v || !g.reach_from(u, Some(x), None)[v])
        .collect();
    cut.dedup();
    Ok(cut)
}

/// Whether `u` strictly dominates some node, decided from neighborhoods
/// alone: toward `s`, some node has `u` as its only in-neighbor; toward `t`,
/// some node has `u` as its only out-neighbor.
pub fn is_dominator_by_neighborhood(g: &StDag, u: NodeId, direction: Direction) -> bool {
    match direction {
        Direction::TowardS => g.successors(u).iter().any(|&v| g.predecessors(v) == [u]),
        Direction::TowardT => g.predecessors(u).iter().any(|&v| g.successors(v) == [u]),
    }
}

/// The `s`-`v` cutnodes followed by the `v`-`t` cutnodes of an anchor `v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extension {
    pub anchor: NodeId,
    pub sequence: Vec<NodeId>,
}

/// Root-to-anchor path of the source tree joined with the anchor-to-root
/// path of the sink tree; the anchor appears once.
pub fn extension(s_tree: &DominatorTree, t_tree: &DominatorTree, anchor: NodeId) -> Extension {
    let mut sequence = s_tree.path_to_root(anchor);
    sequence.reverse();
    let mut x = anchor;
    while x != t_tree.root {
        x = t_tree.parent[x];
        sequence.push(x);
    }
    Extension { anchor, sequence }
}

/// Extension computed from brute-force cutnodes.
pub fn extension_bruteforce(g: &StDag, anchor: NodeId) -> Vec<NodeId> {
    let mut seq = cutnodes_bruteforce(g, g.source(), anchor).expect("s reaches every node");
    let tail = cutnodes_bruteforce(g, anchor, g.sink()).expect("every node reaches t");
    seq.extend_from_slice(&tail[1..]);
    seq
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{validate_st_dag, DiGraph};

    fn path3() -> StDag {
        validate_st_dag(DiGraph::from_pairs(3, [(0, 1), (1, 2)]).unwrap(), 0, 2).unwrap()
    }

    fn diamond() -> StDag {
        validate_st_dag(
            DiGraph::from_pairs(4, [(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap(),
            0,
            3,
        )
        .unwrap()
    }

    #[test]
    fn chain_dominance() {
        let g = path3();
        let s = build_dominator_tree(&g, Direction::TowardS);
        assert_eq!(s.idom(1), Some(0));
        assert_eq!(s.idom(2), Some(1));
        assert_eq!(s.idom(0), None);
        assert_eq!(s.dom_k(2, 1), 1);
        assert_eq!(s.dom_k(2, 2), 0);
        assert_eq!(s.dom_k(2, 1_000_000_000), 0);
        let t = build_dominator_tree(&g, Direction::TowardT);
        assert_eq!(t.idom(1), Some(2));
        assert_eq!(t.idom(0), Some(1));
    }

    #[test]
    fn diamond_dominance() {
        let g = diamond();
        let s = build_dominator_tree(&g, Direction::TowardS);
        assert_eq!((s.idom(1), s.idom(2), s.idom(3)), (Some(0), Some(0), Some(0)));
        assert!(s.is_ancestor(0, 3));
        assert!(!s.is_ancestor(1, 3));
        assert!(s.is_leaf(1) && s.is_leaf(2) && s.is_leaf(3));
    }

    #[test]
    fn bruteforce_cutnodes() {
        assert_eq!(cutnodes_bruteforce(&path3(), 0, 2).unwrap(), vec![0, 1, 2]);
        assert_eq!(cutnodes_bruteforce(&diamond(), 0, 3).unwrap(), vec![0, 3]);
        assert_eq!(cutnodes_bruteforce(&diamond(), 0, 1).unwrap(), vec![0, 1]);
        assert_eq!(
            cutnodes_bruteforce(&diamond(), 1, 2).unwrap_err(),
            Error::NoPath { from: 1, to: 2 }
        );
    }

    #[test]
    fn neighborhood_dominators() {
        let g = path3();
        assert!(is_dominator_by_neighborhood(&g, 1, Direction::TowardS));
        assert!(is_dominator_by_neighborhood(&g, 1, Direction::TowardT));
        let g = diamond();
        assert!(!is_dominator_by_neighborhood(&g, 1, Direction::TowardS));
        assert!(is_dominator_by_neighborhood(&g, 0, Direction::TowardS));
        assert!(!is_dominator_by_neighborhood(&g, 3, Direction::TowardS));
    }

    #[test]
    fn extensions() {
        let g = path3();
        let (s, t) = (
            build_dominator_tree(&g, Direction::TowardS),
            build_dominator_tree(&g, Direction::TowardT),
        );
        assert_eq!(extension(&s, &t, 1).sequence, vec![0, 1, 2]);
        let g = diamond();
        let (s, t) = (
            build_dominator_tree(&g, Direction::TowardS),
            build_dominator_tree(&g, Direction::TowardT),
        );
        assert_eq!(extension(&s, &t, 1).sequence, vec![0, 1, 3]);
        assert_eq!(extension(&s, &t, 3).sequence, vec![0, 3]);
        assert_eq!(extension(&s, &t, 0).sequence, vec![0, 3]);
    }

    #[test]
    fn debug_exports() {
        let g = path3();
        let s = build_dominator_tree(&g, Direction::TowardS);
        assert_eq!(s.to_indented_text(|v| v.to_string()), "0\n  1\n    2\n");
        assert_eq!(
            s.to_dot(|v| v.to_string()),
            "digraph s_dominator_tree {\n  \"0\" -> \"1\";\n  \"1\" -> \"2\";\n}\n"
        );
    }
}
