//! Directed multigraphs, s-t DAG validation and normalization, and the two
//! compression transforms (node-unitary and arc-unitary paths) that the
//! safety algorithms run on.

use std::collections::VecDeque;

use crate::error::{Error, Result};

pub type NodeId = usize;
pub type ArcId = usize;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arc {
    pub tail: NodeId,
    pub head: NodeId,
    pub weight: f64,
}

/// A directed multigraph. Arc identity is the position in the arc list.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DiGraph {
    node_count: usize,
    arcs: Vec<Arc>,
    labels: Option<Vec<String>>,
}

impl DiGraph {
    pub fn new(node_count: usize) -> Self {
        DiGraph {
            node_count,
            arcs: Vec::new(),
            labels: None,
        }
    }

    /// Builds a graph from `(tail, head, weight)` triples.
    pub fn from_arcs<I>(node_count: usize, arcs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (NodeId, NodeId, f64)>,
    {
        let mut g = DiGraph::new(node_count);
        for (u, v, w) in arcs {
            g.add_arc(u, v, w)?;
        }
        Ok(g)
    }

    /// Same as [`DiGraph::from_arcs`] with every weight set to 1.
    pub fn from_pairs<I>(node_count: usize, arcs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        Self::from_arcs(node_count, arcs.into_iter().map(|(u, v)| (u, v, 1.0)))
    }

    pub fn add_arc(&mut self, tail: NodeId, head: NodeId, weight: f64) -> Result<ArcId> {
        for node in [tail, head] {
            if node >= self.node_count {
                return Err(Error::NodeOutOfRange {
                    node,
                    node_count: self.node_count,
                });
            }
        }
        self.arcs.push(Arc { tail, head, weight });
        Ok(self.arcs.len() - 1)
    }

    pub fn add_node(&mut self) -> NodeId {
        self.node_count += 1;
        if let Some(labels) = &mut self.labels {
            labels.push((self.node_count - 1).to_string());
        }
        self.node_count - 1
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn arc(&self, id: ArcId) -> &Arc {
        &self.arcs[id]
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn set_labels(&mut self, labels: Vec<String>) {
        assert_eq!(labels.len(), self.node_count, "one label per node");
        self.labels = Some(labels);
    }

    /// Label of `v`, falling back to its index.
    pub fn label(&self, v: NodeId) -> String {
        match &self.labels {
            Some(l) => l[v].clone(),
            None => v.to_string(),
        }
    }

    pub fn indegrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.node_count];
        for a in &self.arcs {
            d[a.head] += 1;
        }
        d
    }

    pub fn outdegrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.node_count];
        for a in &self.arcs {
            d[a.tail] += 1;
        }
        d
    }

    fn adjacency(&self) -> (Vec<Vec<ArcId>>, Vec<Vec<ArcId>>) {
        let mut out = vec![Vec::new(); self.node_count];
        let mut inc = vec![Vec::new(); self.node_count];
        for (id, a) in self.arcs.iter().enumerate() {
            out[a.tail].push(id);
            inc[a.head].push(id);
        }
        (out, inc)
    }

    /// Kahn's algorithm with a FIFO queue seeded in id order, so the order is
    /// deterministic. On a cycle, returns a node that lies on (or behind)
    /// the cycle.
    pub fn topological_order(&self) -> Result<Vec<NodeId>> {
        let (out, _) = self.adjacency();
        let mut indeg = self.indegrees();
        let mut order: Vec<NodeId> = (0..self.node_count).filter(|&v| indeg[v] == 0).collect();
        order.reserve(self.node_count);
        let mut next = 0;
        while next < order.len() {
            let v = order[next];
            next += 1;
            for &a in &out[v] {
                let h = self.arcs[a].head;
                indeg[h] -= 1;
                if indeg[h] == 0 {
                    order.push(h);
                }
            }
        }
        if order.len() < self.node_count {
            let node = (0..self.node_count).find(|&v| indeg[v] > 0).unwrap();
            return Err(Error::CycleDetected { node });
        }
        Ok(order)
    }
}

/// A validated s-t DAG: unique source `s`, unique sink `t`, every node on
/// some s-t path. Adjacency and a topological order are cached.
#[derive(Debug, Clone, PartialEq)]
pub struct StDag {
    graph: DiGraph,
    source: NodeId,
    sink: NodeId,
    topo: Vec<NodeId>,
    rank: Vec<usize>,
    out_arcs: Vec<Vec<ArcId>>,
    in_arcs: Vec<Vec<ArcId>>,
    succ: Vec<Vec<NodeId>>,
    pred: Vec<Vec<NodeId>>,
    data_arcs: usize,
}

/// Checks every s-t DAG invariant and computes a topological order.
///
/// The single-node graph with `s == t` and no arcs is accepted; it is what
/// node compression produces for a graph that is one unitary path.
pub fn validate_st_dag(g: DiGraph, s: NodeId, t: NodeId) -> Result<StDag> {
    let n = g.node_count();
    for node in [s, t] {
        if node >= n {
            return Err(Error::NodeOutOfRange { node, node_count: n });
        }
    }
    let topo = g.topological_order()?;
    let indeg = g.indegrees();
    let outdeg = g.outdegrees();
    if s == t {
        if n == 1 && g.arc_count() == 0 {
            return Ok(StDag::assemble(g, s, t, topo));
        }
        let node = (0..n).find(|&v| v != s).unwrap_or(s);
        return Err(Error::UnreachableNode { node });
    }
    for &v in &topo {
        if indeg[v] == 0 && v != s {
            return Err(Error::MultipleSources { node: v });
        }
        if outdeg[v] == 0 && v != t {
            return Err(Error::MultipleSinks { node: v });
        }
    }
    if indeg[s] != 0 {
        return Err(Error::CycleDetected { node: s });
    }
    if outdeg[t] != 0 {
        return Err(Error::CycleDetected { node: t });
    }
    let dag = StDag::assemble(g, s, t, topo);
    let fwd = dag.reach_from(s, None, None);
    let bwd = dag.reach_to(t);
    if let Some(node) = (0..n).find(|&v| !fwd[v] || !bwd[v]) {
        return Err(Error::UnreachableNode { node });
    }
    Ok(dag)
}

/// Adds a fresh source `s` with arcs to every node in `starts` and a fresh
/// sink `t` with arcs from every node in `ends`. Added arcs have weight 0 and
/// are appended after the original arcs, so original arc ids are preserved.
pub fn normalize_to_st_dag(g: DiGraph, starts: &[NodeId], ends: &[NodeId]) -> Result<StDag> {
    g.topological_order()?;
    if starts.is_empty() || ends.is_empty() {
        return Err(Error::EmptyTerminals);
    }
    let data_arcs = g.arc_count();
    let mut g = g;
    let s = g.add_node();
    let t = g.add_node();
    if let Some(labels) = &mut g.labels {
        labels[s] = "s".to_string();
        labels[t] = "t".to_string();
    }
    for &x in starts {
        g.add_arc(s, x, 0.0)?;
    }
    for &y in ends {
        g.add_arc(y, t, 0.0)?;
    }
    let mut dag = validate_st_dag(g, s, t)?;
    dag.data_arcs = data_arcs;
    Ok(dag)
}

/// [`normalize_to_st_dag`] with all indegree-0 nodes as starts and all
/// outdegree-0 nodes as ends.
pub fn normalize_default(g: DiGraph) -> Result<StDag> {
    let indeg = g.indegrees();
    let outdeg = g.outdegrees();
    let starts: Vec<NodeId> = (0..g.node_count()).filter(|&v| indeg[v] == 0).collect();
    let ends: Vec<NodeId> = (0..g.node_count()).filter(|&v| outdeg[v] == 0).collect();
    normalize_to_st_dag(g, &starts, &ends)
}

/// Uses the graph as-is when it already has a unique source and sink,
/// otherwise normalizes it.
pub fn into_st_dag(g: DiGraph) -> Result<StDag> {
    let indeg = g.indegrees();
    let outdeg = g.outdegrees();
    let sources: Vec<NodeId> = (0..g.node_count()).filter(|&v| indeg[v] == 0).collect();
    let sinks: Vec<NodeId> = (0..g.node_count()).filter(|&v| outdeg[v] == 0).collect();
    match (sources.as_slice(), sinks.as_slice()) {
        ([s], [t]) if s != t => validate_st_dag(g, *s, *t),
        _ => normalize_default(g),
    }
}

impl StDag {
    fn assemble(graph: DiGraph, source: NodeId, sink: NodeId, topo: Vec<NodeId>) -> Self {
        let n = graph.node_count();
        let mut rank = vec![0; n];
        for (i, &v) in topo.iter().enumerate() {
            rank[v] = i;
        }
        let (out_arcs, in_arcs) = graph.adjacency();
        let neighbors = |lists: &Vec<Vec<ArcId>>, pick: fn(&Arc) -> NodeId| -> Vec<Vec<NodeId>> {
            lists
                .iter()
                .map(|l| {
                    let mut vs: Vec<NodeId> = l.iter().map(|&a| pick(&graph.arcs[a])).collect();
                    vs.sort_unstable_by_key(|&v| rank[v]);
                    vs.dedup();
                    vs
                })
                .collect()
        };
        let succ = neighbors(&out_arcs, |a| a.head);
        let pred = neighbors(&in_arcs, |a| a.tail);
        let data_arcs = graph.arc_count();
        StDag {
            graph,
            source,
            sink,
            topo,
            rank,
            out_arcs,
            in_arcs,
            succ,
            pred,
            data_arcs,
        }
    }

    pub fn graph(&self) -> &DiGraph {
        &self.graph
    }

    pub fn into_graph(self) -> DiGraph {
        self.graph
    }

    pub fn source(&self) -> NodeId {
        self.source
    }

    pub fn sink(&self) -> NodeId {
        self.sink
    }

    pub fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    pub fn arc_count(&self) -> usize {
        self.graph.arc_count()
    }

    pub fn arc(&self, id: ArcId) -> &Arc {
        self.graph.arc(id)
    }

    pub fn arcs(&self) -> &[Arc] {
        self.graph.arcs()
    }

    pub fn topo_order(&self) -> &[NodeId] {
        &self.topo
    }

    /// Position of `v` in the topological order.
    pub fn rank(&self, v: NodeId) -> usize {
        self.rank[v]
    }

    pub fn out_arcs(&self, v: NodeId) -> &[ArcId] {
        &self.out_arcs[v]
    }

    pub fn in_arcs(&self, v: NodeId) -> &[ArcId] {
        &self.in_arcs[v]
    }

    /// Distinct out-neighbors of `v`, in topological order.
    pub fn successors(&self, v: NodeId) -> &[NodeId] {
        &self.succ[v]
    }

    /// Distinct in-neighbors of `v`, in topological order.
    pub fn predecessors(&self, v: NodeId) -> &[NodeId] {
        &self.pred[v]
    }

    /// Number of arcs that came with the input graph. Arcs with larger ids
    /// were added by normalization.
    pub fn data_arc_count(&self) -> usize {
        self.data_arcs
    }

    pub fn is_data_arc(&self, a: ArcId) -> bool {
        a < self.data_arcs
    }

    /// Nodes reachable from `from`, optionally pretending a node or an arc
    /// is deleted. A deleted `from` reaches nothing.
    pub fn reach_from(
        &self,
        from: NodeId,
        avoid_node: Option<NodeId>,
        avoid_arc: Option<ArcId>,
    ) -> Vec<bool> {
        let mut seen = vec![false; self.node_count()];
        if avoid_node == Some(from) {
            return seen;
        }
        seen[from] = true;
        let mut stack = vec![from];
        while let Some(v) = stack.pop() {
            for &a in &self.out_arcs[v] {
                if avoid_arc == Some(a) {
                    continue;
                }
                let h = self.graph.arcs[a].head;
                if !seen[h] && avoid_node != Some(h) {
                    seen[h] = true;
                    stack.push(h);
                }
            }
        }
        seen
    }

    /// Nodes that reach `to`.
    pub fn reach_to(&self, to: NodeId) -> Vec<bool> {
        let mut seen = vec![false; self.node_count()];
        seen[to] = true;
        let mut stack = vec![to];
        while let Some(v) = stack.pop() {
            for &u in &self.pred[v] {
                if !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        seen
    }

    pub fn reaches(&self, u: NodeId, v: NodeId) -> bool {
        u == v || (self.rank[u] < self.rank[v] && self.reach_from(u, None, None)[v])
    }

    /// Full reachability relation (reflexive), one row per node.
    pub fn reachability_closure(&self) -> Vec<Vec<bool>> {
        let n = self.node_count();
        let mut reach = vec![vec![false; n]; n];
        for &v in self.topo.iter().rev() {
            reach[v][v] = true;
            for &w in &self.succ[v] {
                for x in 0..n {
                    if reach[w][x] {
                        reach[v][x] = true;
                    }
                }
            }
        }
        reach
    }

    /// Number of distinct s-t node paths (parallel arcs collapsed),
    /// saturating.
    pub fn count_st_paths(&self) -> u128 {
        self.count_paths(|v| self.succ[v].iter().map(|&w| (w, 1)).collect())
    }

    /// Number of distinct s-t arc paths (parallel arcs distinguished),
    /// saturating.
    pub fn count_st_arc_paths(&self) -> u128 {
        self.count_paths(|v| {
            self.out_arcs[v]
                .iter()
                .map(|&a| (self.graph.arcs[a].head, 1))
                .collect()
        })
    }

    fn count_paths(&self, next: impl Fn(NodeId) -> Vec<(NodeId, u128)>) -> u128 {
        let mut count = vec![0u128; self.node_count()];
        count[self.sink] = 1;
        for &v in self.topo.iter().rev() {
            if v == self.sink {
                continue;
            }
            count[v] = next(v)
                .into_iter()
                .fold(0u128, |acc, (w, mult)| acc.saturating_add(count[w].saturating_mul(mult)));
        }
        count[self.source]
    }
}

/// All distinct s-t paths as node lists, in lexicographic topological order.
/// Paths that differ only in a parallel arc are the same node path.
pub fn all_st_paths(g: &StDag, limit: u128) -> Result<Vec<Vec<NodeId>>> {
    if g.count_st_paths() > limit {
        return Err(Error::PathExplosion { limit });
    }
    let mut paths = Vec::new();
    let mut current = vec![g.source()];
    fn walk(g: &StDag, current: &mut Vec<NodeId>, paths: &mut Vec<Vec<NodeId>>) {
        let v = *current.last().unwrap();
        if v == g.sink() {
            paths.push(current.clone());
            return;
        }
        for &w in g.successors(v) {
            current.push(w);
            walk(g, current, paths);
            current.pop();
        }
    }
    walk(g, &mut current, &mut paths);
    Ok(paths)
}

/// All distinct s-t paths as arc lists; parallel arcs give distinct paths.
pub fn all_st_arc_paths(g: &StDag, limit: u128) -> Result<Vec<Vec<ArcId>>> {
    if g.count_st_arc_paths() > limit {
        return Err(Error::PathExplosion { limit });
    }
    let mut paths = Vec::new();
    fn walk(g: &StDag, v: NodeId, current: &mut Vec<ArcId>, paths: &mut Vec<Vec<ArcId>>) {
        if v == g.sink() {
            paths.push(current.clone());
            return;
        }
        for &a in g.out_arcs(v) {
            current.push(a);
            walk(g, g.arc(a).head, current, paths);
            current.pop();
        }
    }
    walk(g, g.source(), &mut Vec::new(), &mut paths);
    Ok(paths)
}

/// Correspondence between a node-compressed graph and its original.
#[derive(Debug, Clone, PartialEq)]
pub struct CompressionMap {
    /// Original node -> compressed node.
    pub forward: Vec<NodeId>,
    /// Compressed node -> the maximal unitary path it replaces, in path order.
    pub expand: Vec<Vec<NodeId>>,
    /// Compressed arc -> original arc it was copied from.
    pub arc_origin: Vec<ArcId>,
}

impl CompressionMap {
    pub fn expand_sequence(&self, compressed: &[NodeId]) -> Vec<NodeId> {
        compressed
            .iter()
            .flat_map(|&c| self.expand[c].iter().copied())
            .collect()
    }
}

/// Contracts every maximal unitary path into a single node.
///
/// `u -> v` is contracted when `v` is the only out-neighbor of `u` and `u`
/// the only in-neighbor of `v` (parallel arcs count as one adjacency).
/// Arcs inside a contracted path are dropped; all other arcs are kept with
/// their multiplicity, in original arc order. A graph that is one unitary
/// path compresses to a single node that is both source and sink.
pub fn compress_nodes(g: &StDag) -> (StDag, CompressionMap) {
    let n = g.node_count();
    let mut next = vec![None; n];
    let mut has_prev = vec![false; n];
    for v in 0..n {
        if let [w] = g.successors(v) {
            if g.predecessors(*w) == [v] {
                next[v] = Some(*w);
                has_prev[*w] = true;
            }
        }
    }
    let mut forward = vec![usize::MAX; n];
    let mut expand = Vec::new();
    for &v in g.topo_order() {
        if has_prev[v] {
            continue;
        }
        let id = expand.len();
        let mut group = vec![v];
        forward[v] = id;
        let mut cur = v;
        while let Some(w) = next[cur] {
            forward[w] = id;
            group.push(w);
            cur = w;
        }
        expand.push(group);
    }
    let mut cg = DiGraph::new(expand.len());
    if let Some(labels) = g.graph().labels() {
        cg.set_labels(
            expand
                .iter()
                .map(|grp| grp.iter().map(|&v| labels[v].as_str()).collect::<Vec<_>>().join("+"))
                .collect(),
        );
    }
    let mut arc_origin = Vec::new();
    for (id, a) in g.arcs().iter().enumerate() {
        let (cu, cv) = (forward[a.tail], forward[a.head]);
        if cu != cv {
            cg.arcs.push(Arc {
                tail: cu,
                head: cv,
                weight: a.weight,
            });
            arc_origin.push(id);
        }
    }
    let dag = validate_st_dag(cg, forward[g.source()], forward[g.sink()])
        .expect("compression preserves the s-t DAG invariants");
    (
        dag,
        CompressionMap {
            forward,
            expand,
            arc_origin,
        },
    )
}

/// Correspondence between an arc-compressed graph and its original.
#[derive(Debug, Clone, PartialEq)]
pub struct ArcCompressionMap {
    /// Compressed arc -> the maximal unitary arc path it replaces.
    pub expand: Vec<Vec<ArcId>>,
    /// Original node -> compressed node, `None` for contracted interior nodes.
    pub node_forward: Vec<Option<NodeId>>,
}

impl ArcCompressionMap {
    pub fn expand_sequence(&self, compressed: &[ArcId]) -> Vec<ArcId> {
        compressed
            .iter()
            .flat_map(|&c| self.expand[c].iter().copied())
            .collect()
    }
}

/// Replaces every maximal path whose interior nodes have indegree and
/// outdegree exactly 1 by a single arc. Parallel arcs may appear. Compressed
/// arcs are ordered by the id of the first original arc they replace and
/// carry that arc's weight.
pub fn compress_arcs(g: &StDag) -> (StDag, ArcCompressionMap) {
    let n = g.node_count();
    let interior: Vec<bool> = (0..n)
        .map(|v| g.in_arcs(v).len() == 1 && g.out_arcs(v).len() == 1)
        .collect();
    let mut node_forward = vec![None; n];
    let mut kept = 0;
    for v in 0..n {
        if !interior[v] {
            node_forward[v] = Some(kept);
            kept += 1;
        }
    }
    let mut chains: Vec<Vec<ArcId>> = Vec::new();
    for (id, a) in g.arcs().iter().enumerate() {
        if interior[a.tail] {
            continue;
        }
        let mut chain = vec![id];
        let mut head = a.head;
        while interior[head] {
            let nxt = g.out_arcs(head)[0];
            chain.push(nxt);
            head = g.arc(nxt).head;
        }
        chains.push(chain);
    }
    let mut cg = DiGraph::new(kept);
    if let Some(labels) = g.graph().labels() {
        cg.set_labels(
            (0..n)
                .filter(|&v| !interior[v])
                .map(|v| labels[v].clone())
                .collect(),
        );
    }
    for chain in &chains {
        let first = g.arc(chain[0]);
        let last = g.arc(*chain.last().unwrap());
        cg.arcs.push(Arc {
            tail: node_forward[first.tail].unwrap(),
            head: node_forward[last.head].unwrap(),
            weight: first.weight,
        });
    }
    let dag = validate_st_dag(
        cg,
        node_forward[g.source()].unwrap(),
        node_forward[g.sink()].unwrap(),
    )
    .expect("arc compression preserves the s-t DAG invariants");
    (
        dag,
        ArcCompressionMap {
            expand: chains,
            node_forward,
        },
    )
}

/// Line graph of an s-t DAG, augmented with an abstract source joined to
/// every arc leaving `s` and an abstract sink joined from every arc entering
/// `t`. Line node `i < m` stands for arc `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct LineGraph {
    pub dag: StDag,
    pub source: NodeId,
    pub sink: NodeId,
}

impl LineGraph {
    pub fn is_abstract(&self, v: NodeId) -> bool {
        v == self.source || v == self.sink
    }

    pub fn arc_of(&self, v: NodeId) -> Option<ArcId> {
        (!self.is_abstract(v)).then_some(v)
    }

    /// Drops the abstract endpoints from a line-node sequence.
    pub fn strip(&self, nodes: &[NodeId]) -> Vec<ArcId> {
        nodes.iter().filter_map(|&v| self.arc_of(v)).collect()
    }
}

pub fn line_graph(g: &StDag) -> LineGraph {
    let m = g.arc_count();
    let (src, snk) = (m, m + 1);
    let mut lg = DiGraph::new(m + 2);
    for a in g.out_arcs(g.source()) {
        lg.arcs.push(Arc {
            tail: src,
            head: *a,
            weight: 0.0,
        });
    }
    for (id, a) in g.arcs().iter().enumerate() {
        for &b in g.out_arcs(a.head) {
            lg.arcs.push(Arc {
                tail: id,
                head: b,
                weight: 0.0,
            });
        }
    }
    for a in g.in_arcs(g.sink()) {
        lg.arcs.push(Arc {
            tail: *a,
            head: snk,
            weight: 0.0,
        });
    }
    let dag = validate_st_dag(lg, src, snk).expect("line graph of an s-t DAG is an s-t DAG");
    LineGraph {
        dag,
        source: src,
        sink: snk,
    }
}

/// Whether `u` reaches `v` without using `arc`. Only nodes ranked at most
/// `v` are explored.
pub(crate) fn reaches_avoiding_arc(g: &StDag, u: NodeId, v: NodeId, arc: ArcId) -> bool {
    let limit = g.rank(v);
    let mut seen = vec![false; g.node_count()];
    let mut queue = VecDeque::from([u]);
    seen[u] = true;
    while let Some(x) = queue.pop_front() {
        if x == v {
            return true;
        }
        for &a in g.out_arcs(x) {
            if a == arc {
                continue;
            }
            let h = g.arc(a).head;
            if !seen[h] && g.rank(h) <= limit {
                seen[h] = true;
                queue.push_back(h);
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> StDag {
        // s=0 -> a=1 -> t=2
        validate_st_dag(DiGraph::from_pairs(3, [(0, 1), (1, 2)]).unwrap(), 0, 2).unwrap()
    }

    fn diamond() -> StDag {
        // s=0, a=1, b=2, t=3
        validate_st_dag(
            DiGraph::from_pairs(4, [(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap(),
            0,
            3,
        )
        .unwrap()
    }

    #[test]
    fn normalize_single_node() {
        let g = DiGraph::new(1);
        let dag = normalize_to_st_dag(g, &[0], &[0]).unwrap();
        assert_eq!(dag.node_count(), 3);
        assert_eq!(dag.arc_count(), 2);
        assert_eq!((dag.source(), dag.sink()), (1, 2));
        assert_eq!(dag.data_arc_count(), 0);
    }

    #[test]
    fn normalize_joins_starts_and_ends() {
        // a=0, b=1, c=2
        let g = DiGraph::from_pairs(3, [(0, 2), (1, 2)]).unwrap();
        let dag = normalize_to_st_dag(g, &[0, 1], &[2]).unwrap();
        let arcs: Vec<(usize, usize)> = dag.arcs().iter().map(|a| (a.tail, a.head)).collect();
        assert_eq!(arcs, vec![(0, 2), (1, 2), (3, 0), (3, 1), (2, 4)]);
        assert!(dag.is_data_arc(1) && !dag.is_data_arc(2));
    }

    #[test]
    fn normalize_reports_unreachable() {
        // node 2 is neither a start nor reachable from one
        let g = DiGraph::from_pairs(3, [(0, 1), (2, 1)]).unwrap();
        let err = normalize_to_st_dag(g, &[0], &[1]).unwrap_err();
        assert!(matches!(err, Error::MultipleSources { node: 2 } | Error::UnreachableNode { node: 2 }));
    }

    #[test]
    fn normalize_rejects_cycle() {
        let g = DiGraph::from_pairs(2, [(0, 1), (1, 0)]).unwrap();
        assert!(matches!(normalize_default(g), Err(Error::CycleDetected { .. })));
    }

    #[test]
    fn validate_errors() {
        assert!(validate_st_dag(DiGraph::from_pairs(3, [(0, 1), (1, 2)]).unwrap(), 0, 2).is_ok());
        // s=0, a=1, t=2: a cannot reach t
        let err = validate_st_dag(DiGraph::from_pairs(3, [(0, 1), (0, 2)]).unwrap(), 0, 2).unwrap_err();
        assert_eq!(err, Error::MultipleSinks { node: 1 });
        // s=0, a=1, b=2, t=3 with a<->b
        let g = DiGraph::from_pairs(4, [(0, 1), (1, 2), (2, 1), (1, 3)]).unwrap();
        assert!(matches!(validate_st_dag(g, 0, 3), Err(Error::CycleDetected { .. })));
        let g = DiGraph::from_pairs(3, [(0, 2), (1, 2)]).unwrap();
        assert_eq!(validate_st_dag(g, 0, 2).unwrap_err(), Error::MultipleSources { node: 1 });
    }

    #[test]
    fn compress_whole_path_to_one_node() {
        let g = validate_st_dag(DiGraph::from_pairs(4, [(0, 1), (1, 2), (2, 3)]).unwrap(), 0, 3).unwrap();
        let (c, map) = compress_nodes(&g);
        assert_eq!(c.node_count(), 1);
        assert_eq!(c.source(), c.sink());
        assert_eq!(map.expand, vec![vec![0, 1, 2, 3]]);
    }

    #[test]
    fn compress_diamond_unchanged() {
        let g = diamond();
        let (c, map) = compress_nodes(&g);
        assert_eq!(c.node_count(), 4);
        assert_eq!(c.arc_count(), 4);
        assert!(map.expand.iter().all(|e| e.len() == 1));
        // no arc uv with N+(u) = {v} and N-(v) = {u}
        for a in c.arcs() {
            assert!(!(c.successors(a.tail) == [a.head] && c.predecessors(a.head) == [a.tail]));
        }
    }

    #[test]
    fn compress_inner_chain() {
        // s=0 -> {1, 2}; 1 -> 3 -> 4 -> 5; 2 -> 5; 5 -> t=6
        let g = validate_st_dag(
            DiGraph::from_pairs(7, [(0, 1), (0, 2), (1, 3), (3, 4), (4, 5), (2, 5), (5, 6)]).unwrap(),
            0,
            6,
        )
        .unwrap();
        let (c, map) = compress_nodes(&g);
        assert!(map.expand.contains(&vec![1, 3, 4]));
        assert!(map.expand.contains(&vec![5, 6]));
        assert_eq!(c.node_count(), 4);
    }

    #[test]
    fn compress_parallel_arcs_merge_nodes() {
        // s=0 => a=1 (two arcs) -> t=2 : one unitary path
        let g = validate_st_dag(DiGraph::from_pairs(3, [(0, 1), (0, 1), (1, 2)]).unwrap(), 0, 2).unwrap();
        let (c, _) = compress_nodes(&g);
        assert_eq!(c.node_count(), 1);
    }

    #[test]
    fn arc_compression() {
        let (c, map) = compress_arcs(&path3());
        assert_eq!(c.node_count(), 2);
        assert_eq!(c.arc_count(), 1);
        assert_eq!(map.expand, vec![vec![0, 1]]);

        // s->a->t plus s->t
        let g = validate_st_dag(DiGraph::from_pairs(3, [(0, 1), (1, 2), (0, 2)]).unwrap(), 0, 2).unwrap();
        let (c, map) = compress_arcs(&g);
        assert_eq!(c.arc_count(), 2);
        assert!(c.arcs().iter().all(|a| a.tail == c.source() && a.head == c.sink()));
        assert_eq!(map.expand, vec![vec![0, 1], vec![2]]);

        let (c, _) = compress_arcs(&diamond());
        assert_eq!((c.node_count(), c.arc_count()), (2, 2));
    }

    #[test]
    fn line_graph_examples() {
        let lg = line_graph(&path3());
        assert_eq!(lg.dag.node_count(), 4);
        assert_eq!(lg.dag.arc_count(), 3);
        assert_eq!(lg.dag.successors(0), &[1]);

        let lg = line_graph(&diamond());
        // arcs: 0=sa, 1=sb, 2=at, 3=bt
        assert_eq!(lg.dag.successors(0), &[2]);
        assert_eq!(lg.dag.successors(1), &[3]);

        // s=0,a=1,b=2,t=3 ; arcs sa=0, sb=1, at=2, bt=3, ab=4
        let g = validate_st_dag(
            DiGraph::from_pairs(4, [(0, 1), (0, 2), (1, 3), (2, 3), (1, 2)]).unwrap(),
            0,
            3,
        )
        .unwrap();
        let lg = line_graph(&g);
        let inner: Vec<(usize, usize)> = lg
            .dag
            .arcs()
            .iter()
            .filter(|a| !lg.is_abstract(a.tail) && !lg.is_abstract(a.head))
            .map(|a| (a.tail, a.head))
            .collect();
        let mut expected = vec![(0, 2), (0, 4), (4, 3), (1, 3)];
        expected.sort();
        let mut got = inner.clone();
        got.sort();
        assert_eq!(got, expected);
    }

    #[test]
    fn path_enumeration() {
        assert_eq!(all_st_paths(&path3(), 10).unwrap(), vec![vec![0, 1, 2]]);
        assert_eq!(all_st_paths(&diamond(), 10).unwrap().len(), 2);
        // chain of d diamonds has 2^d paths
        for d in 1..=6 {
            let mut arcs = Vec::new();
            for i in 0..d {
                let base = 3 * i;
                arcs.extend([(base, base + 1), (base, base + 2), (base + 1, base + 3), (base + 2, base + 3)]);
            }
            let n = 3 * d + 1;
            let g = validate_st_dag(DiGraph::from_pairs(n, arcs).unwrap(), 0, n - 1).unwrap();
            assert_eq!(all_st_paths(&g, 1 << 10).unwrap().len(), 1 << d);
            assert_eq!(g.count_st_paths(), 1 << d);
        }
        assert!(matches!(all_st_paths(&diamond(), 1), Err(Error::PathExplosion { .. })));
    }

    #[test]
    fn arc_paths_distinguish_parallel_arcs() {
        let g = validate_st_dag(DiGraph::from_pairs(2, [(0, 1), (0, 1)]).unwrap(), 0, 1).unwrap();
        assert_eq!(all_st_paths(&g, 10).unwrap().len(), 1);
        assert_eq!(all_st_arc_paths(&g, 10).unwrap(), vec![vec![0], vec![1]]);
    }
}
