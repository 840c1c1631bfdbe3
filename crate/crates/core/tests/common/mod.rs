#![allow(dead_code)]

use rand::Rng;
use safeseq::graph::{validate_st_dag, DiGraph, StDag};

/// Every s-t DAG on `n` nodes whose topological order is `0..n`, with `0`
/// as source and `n - 1` as sink. Every DAG has such a labeling, so this
/// covers all s-t DAGs on `n` nodes (with isomorphic repeats).
pub struct Exhaustive {
    n: usize,
    pairs: Vec<(usize, usize)>,
    mask: u64,
    end: u64,
}

pub fn exhaustive_dags(n: usize) -> Exhaustive {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    Exhaustive {
        n,
        end: 1u64 << pairs.len(),
        pairs,
        mask: 0,
    }
}

impl Iterator for Exhaustive {
    type Item = StDag;

    fn next(&mut self) -> Option<StDag> {
        while self.mask < self.end {
            let mask = self.mask;
            self.mask += 1;
            let mut has_in = vec![false; self.n];
            let mut has_out = vec![false; self.n];
            for (b, &(i, j)) in self.pairs.iter().enumerate() {
                if mask >> b & 1 == 1 {
                    has_out[i] = true;
                    has_in[j] = true;
                }
            }
            if (1..self.n - 1).any(|v| !has_in[v] || !has_out[v]) || (self.n > 1 && !has_out[0]) {
                continue;
            }
            let arcs = self
                .pairs
                .iter()
                .enumerate()
                .filter(|(b, _)| mask >> b & 1 == 1)
                .map(|(_, &p)| p);
            let g = DiGraph::from_pairs(self.n, arcs).unwrap();
            return Some(validate_st_dag(g, 0, self.n - 1).unwrap());
        }
        None
    }
}

/// All exhaustive s-t DAGs with 2 to `max_n` nodes.
pub fn all_small_dags(max_n: usize) -> impl Iterator<Item = StDag> {
    (2..=max_n).flat_map(exhaustive_dags)
}

/// Random s-t DAG on `n >= 2` nodes: arcs `i -> j` (`i < j`) with
/// probability `p`, then every internal node missing an in- or out-arc gets
/// one to a random lower or higher node.
pub fn random_dag<R: Rng>(rng: &mut R, n: usize, p: f64) -> StDag {
    random_weighted_dag(rng, n, p, 1)
}

/// As [`random_dag`] with integer weights drawn from `1..=max_weight`.
pub fn random_weighted_dag<R: Rng>(rng: &mut R, n: usize, p: f64, max_weight: u32) -> StDag {
    let mut arcs: Vec<(usize, usize)> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(p) {
                arcs.push((i, j));
            }
        }
    }
    for v in 1..n - 1 {
        if !arcs.iter().any(|&(_, h)| h == v) {
            arcs.push((rng.gen_range(0..v), v));
        }
        if !arcs.iter().any(|&(t, _)| t == v) {
            arcs.push((v, rng.gen_range(v + 1..n)));
        }
    }
    if !arcs.iter().any(|&(t, _)| t == 0) {
        arcs.push((0, n - 1));
    }
    let mut g = DiGraph::new(n);
    for (t, h) in arcs {
        g.add_arc(t, h, rng.gen_range(1..=max_weight) as f64).unwrap();
    }
    validate_st_dag(g, 0, n - 1).unwrap()
}

/// Copies of random arcs appended until the graph has `target` arcs.
pub fn inject_parallel<R: Rng>(rng: &mut R, g: &StDag, target: usize) -> StDag {
    let mut d = g.graph().clone();
    while d.arc_count() < target {
        let a = *d.arc(rng.gen_range(0..d.arc_count()));
        d.add_arc(a.tail, a.head, a.weight).unwrap();
    }
    validate_st_dag(d, g.source(), g.sink()).unwrap()
}

/// With arcs listed as `(tail, head)` pairs, for failure messages.
pub fn describe(g: &StDag) -> String {
    let arcs: Vec<String> = g
        .arcs()
        .iter()
        .map(|a| format!("{}->{}", a.tail, a.head))
        .collect();
    format!("n={} [{}]", g.node_count(), arcs.join(", "))
}
