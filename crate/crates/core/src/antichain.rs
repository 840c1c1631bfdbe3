//! Maximum-weight arc antichains through minimum flows with lower bounds,
//! and the selection of pairwise path-incompatible safe sequences used to
//! fix ILP variables.

use std::collections::VecDeque;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::{ArcId, NodeId, StDag};
use crate::safety::{
    forced_arcs, longest_safe_sequence_per_arc, maximal_safe_arc_sequences,
    maximal_safe_arc_sequences_subset, maximal_safe_sequences, maximal_safe_sequences_subset,
};

/// Capacity used for unbounded arcs.
pub const INF: i64 = i64::MAX / 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FlowArc {
    pub tail: NodeId,
    pub head: NodeId,
    pub lower: i64,
    /// `None` for unbounded.
    pub capacity: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowNetwork {
    pub node_count: usize,
    pub arcs: Vec<FlowArc>,
    pub source: NodeId,
    pub sink: NodeId,
}

impl FlowNetwork {
    /// Network over `g` with `lower(a) = weights[a]` and unbounded
    /// capacities.
    pub fn from_dag(g: &StDag, weights: &[i64]) -> Self {
        FlowNetwork {
            node_count: g.node_count(),
            arcs: g
                .arcs()
                .iter()
                .zip(weights)
                .map(|(a, &w)| FlowArc {
                    tail: a.tail,
                    head: a.head,
                    lower: w,
                    capacity: None,
                })
                .collect(),
            source: g.source(),
            sink: g.sink(),
        }
    }

    /// DIMACS-like text: `p min <nodes> <arcs>`, `n <id> s|t`, then
    /// `a <tail> <head> <lower> <capacity|inf>`, all 1-based.
    pub fn to_dimacs(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "p min {} {}", self.node_count, self.arcs.len());
        let _ = writeln!(out, "n {} s", self.source + 1);
        let _ = writeln!(out, "n {} t", self.sink + 1);
        for a in &self.arcs {
            let cap = a.capacity.map_or("inf".to_string(), |c| c.to_string());
            let _ = writeln!(out, "a {} {} {} {}", a.tail + 1, a.head + 1, a.lower, cap);
        }
        out
    }
}

/// Residual graph with paired edges (`e ^ 1` is the reverse of `e`).
struct Residual {
    head: Vec<usize>,
    cap: Vec<i64>,
    adj: Vec<Vec<usize>>,
}

impl Residual {
    fn new(n: usize) -> Self {
        Residual {
            head: Vec::new(),
            cap: Vec::new(),
            adj: vec![Vec::new(); n],
        }
    }

    fn add(&mut self, u: usize, v: usize, cap: i64) -> usize {
        let e = self.head.len();
        self.head.push(v);
        self.cap.push(cap);
        self.adj[u].push(e);
        self.head.push(u);
        self.cap.push(0);
        self.adj[v].push(e + 1);
        e
    }

    /// Edmonds-Karp: shortest augmenting paths until none is left.
    fn max_flow(&mut self, s: usize, t: usize) -> i64 {
        let n = self.adj.len();
        let mut total = 0i64;
        loop {
            let mut via = vec![usize::MAX; n];
            let mut seen = vec![false; n];
            seen[s] = true;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                if u == t {
                    break;
                }
                for &e in &self.adj[u] {
                    let v = self.head[e];
                    if self.cap[e] > 0 && !seen[v] {
                        seen[v] = true;
                        via[v] = e;
                        queue.push_back(v);
                    }
                }
            }
            if !seen[t] {
                return total;
            }
            let mut push = INF;
            let mut v = t;
            while v != s {
                let e = via[v];
                push = push.min(self.cap[e]);
                v = self.head[e ^ 1];
            }
            let mut v = t;
            while v != s {
                let e = via[v];
                self.cap[e] -= push;
                self.cap[e ^ 1] += push;
                v = self.head[e ^ 1];
            }
            total += push;
        }
    }

    fn reachable(&self, from: usize) -> Vec<bool> {
        let mut seen = vec![false; self.adj.len()];
        seen[from] = true;
        let mut stack = vec![from];
        while let Some(u) = stack.pop() {
            for &e in &self.adj[u] {
                let v = self.head[e];
                if self.cap[e] > 0 && !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinFlow {
    pub value: i64,
    pub flow: Vec<i64>,
    /// Nodes of the network reachable from the sink in the final residual
    /// graph; arcs entering this set from outside form a minimum cut.
    pub sink_side: Vec<bool>,
}

/// Minimum source-to-sink flow meeting every lower bound: a feasible flow
/// first, then as much flow as possible pushed back from sink to source.
pub fn min_flow_with_lower_bounds(net: &FlowNetwork) -> Result<MinFlow> {
    let n = net.node_count;
    let (ss, tt) = (n, n + 1);
    let mut r = Residual::new(n + 2);
    let mut excess = vec![0i64; n];
    let mut edges = Vec::with_capacity(net.arcs.len());
    for a in &net.arcs {
        let cap = a.capacity.unwrap_or(INF);
        if a.lower < 0 || cap < a.lower {
            return Err(Error::Infeasible);
        }
        edges.push(r.add(a.tail, a.head, cap - a.lower));
        excess[a.head] += a.lower;
        excess[a.tail] -= a.lower;
    }
    let back = r.add(net.sink, net.source, INF);
    let mut demand = 0;
    let mut supers = Vec::new();
    for (v, &x) in excess.iter().enumerate() {
        if x > 0 {
            supers.push(r.add(ss, v, x));
            demand += x;
        } else if x < 0 {
            supers.push(r.add(v, tt, -x));
        }
    }
    if r.max_flow(ss, tt) != demand {
        return Err(Error::Infeasible);
    }
    let feasible = r.cap[back ^ 1];
    for e in supers.into_iter().chain([back]) {
        r.cap[e] = 0;
        r.cap[e ^ 1] = 0;
    }
    let returned = r.max_flow(net.sink, net.source);
    let flow: Vec<i64> = net
        .arcs
        .iter()
        .zip(&edges)
        .map(|(a, &e)| a.lower + r.cap[e ^ 1])
        .collect();
    let mut sink_side = r.reachable(net.sink);
    sink_side.truncate(n);
    Ok(MinFlow {
        value: feasible - returned,
        flow,
        sink_side,
    })
}

/// A safe sequence attached to an antichain arc, with the arcs whose ILP
/// variables it fixes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixingSequence {
    pub antichain_arc: ArcId,
    /// Node sequence, when selected in a node mode.
    pub nodes: Option<Vec<NodeId>>,
    pub fixed_arcs: Vec<ArcId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AntichainSelection {
    pub arcs: Vec<ArcId>,
    pub weight: i64,
    pub attached_sequences: Vec<FixingSequence>,
}

/// Maximum-weight set of pairwise unreachable arcs, for nonnegative
/// weights. Its weight equals the minimum flow with `lower = weights`.
pub fn max_weight_arc_antichain(g: &StDag, weights: &[i64]) -> AntichainSelection {
    assert_eq!(weights.len(), g.arc_count(), "one weight per arc");
    let net = FlowNetwork::from_dag(g, weights);
    let mf = min_flow_with_lower_bounds(&net).expect("every arc lies on an s-t path");
    let arcs: Vec<ArcId> = (0..g.arc_count())
        .filter(|&a| !mf.sink_side[g.arc(a).tail] && mf.sink_side[g.arc(a).head])
        .collect();
    let weight: i64 = arcs.iter().map(|&a| weights[a]).sum();
    assert_eq!(weight, mf.value, "antichain weight equals the minimum flow");
    assert!(is_arc_antichain(g, &arcs), "cut arcs are pairwise unreachable");
    AntichainSelection {
        arcs,
        weight,
        attached_sequences: Vec::new(),
    }
}

/// Whether no arc of `arcs` reaches another (head of one reaching the tail
/// of the other, or sharing a path).
pub fn is_arc_antichain(g: &StDag, arcs: &[ArcId]) -> bool {
    arcs.iter().enumerate().all(|(i, &a)| {
        let reach = g.reach_from(g.arc(a).head, None, None);
        arcs.iter()
            .enumerate()
            .all(|(j, &b)| i == j || (a != b && !reach[g.arc(b).tail]))
    })
}

/// Maximum number of pairwise unreachable arcs; also the minimum number of
/// s-t paths covering every arc.
pub fn arc_width(g: &StDag) -> usize {
    max_weight_arc_antichain(g, &vec![1; g.arc_count()]).arcs.len()
}

/// Which safe sequences feed the fixing step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SafetyMode {
    Nodes,
    Arcs,
    NodeSubset(Vec<NodeId>),
    ArcSubset(Vec<ArcId>),
}

/// Weights each arc by the length of a longest safe sequence containing it,
/// takes a maximum-weight antichain and attaches that sequence to every
/// antichain arc of positive weight. No s-t path contains two attached
/// sequences, since each one forces its antichain arc.
pub fn select_fixing_sequences(g: &StDag, mode: &SafetyMode) -> Result<AntichainSelection> {
    let m = g.arc_count();
    let mut best: Vec<(usize, Option<FixingSequence>)> = vec![(0, None); m];
    match mode {
        SafetyMode::Nodes | SafetyMode::NodeSubset(_) => {
            let set = match mode {
                SafetyMode::NodeSubset(c) => maximal_safe_sequences_subset(g, c)?,
                _ => maximal_safe_sequences(g),
            };
            for (a, (len, idx)) in longest_safe_sequence_per_arc(g, &set).into_iter().enumerate() {
                if let Some(i) = idx {
                    let nodes = set.sequences[i].nodes.clone();
                    best[a] = (
                        len,
                        Some(FixingSequence {
                            antichain_arc: a,
                            fixed_arcs: forced_arcs(g, &nodes),
                            nodes: Some(nodes),
                        }),
                    );
                }
            }
        }
        SafetyMode::Arcs | SafetyMode::ArcSubset(_) => {
            let seqs = match mode {
                SafetyMode::ArcSubset(c) => maximal_safe_arc_sequences_subset(g, c)?,
                _ => maximal_safe_arc_sequences(g),
            };
            for s in &seqs {
                for &a in &s.arcs {
                    if s.arcs.len() > best[a].0 {
                        best[a] = (
                            s.arcs.len(),
                            Some(FixingSequence {
                                antichain_arc: a,
                                nodes: None,
                                fixed_arcs: s.arcs.clone(),
                            }),
                        );
                    }
                }
            }
        }
    }
    let weights: Vec<i64> = best.iter().map(|(l, _)| *l as i64).collect();
    let mut sel = max_weight_arc_antichain(g, &weights);
    sel.attached_sequences = sel
        .arcs
        .iter()
        .filter_map(|&a| best[a].1.clone())
        .collect();
    Ok(sel)
}
