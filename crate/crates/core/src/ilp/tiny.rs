//! Exact solver for tiny instances: every choice of k s-t paths is tried
//! and the continuous weights are optimized for each.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::graph::{all_st_arc_paths, ArcId, StDag};

use super::lp::Sense;
use super::model::{IlpModel, Problem};
use super::nnls::nnls;
use super::simplex::{minimize, Constraint, LpOutcome};

#[derive(Debug, Clone, PartialEq)]
pub struct PathSolution {
    /// One arc path per path index; a path may repeat with weight 0.
    pub paths: Vec<Vec<ArcId>>,
    pub weights: Vec<f64>,
    /// Per-path slacks, MinPathError only.
    pub slacks: Vec<f64>,
    pub objective: f64,
}

/// Optimum over all k-multisets of s-t paths. Fails with `PathExplosion`
/// when `paths^k` exceeds `limit`, and `Infeasible` when no k paths can
/// cover every positive-weight data arc (MinPathError).
pub fn solve_tiny(g: &StDag, k: usize, problem: Problem, limit: u128) -> Result<PathSolution> {
    search(g, k, problem, &[], limit)
}

/// Same as [`solve_tiny`] on a model, honoring its fixed variables: path
/// `i` must traverse every arc fixed for index `i`.
pub fn solve_tiny_model(g: &StDag, model: &IlpModel, limit: u128) -> Result<PathSolution> {
    let mut required: Vec<Vec<ArcId>> = Vec::new();
    for f in &model.fixes {
        if required.len() < f.path {
            required.resize(f.path, Vec::new());
        }
        required[f.path - 1].push(f.arc);
    }
    search(g, model.k, model.problem, &required, limit)
}

struct Inner {
    weights: Vec<f64>,
    slacks: Vec<f64>,
    objective: f64,
}

fn search(
    g: &StDag,
    k: usize,
    problem: Problem,
    required: &[Vec<ArcId>],
    limit: u128,
) -> Result<PathSolution> {
    if k < 1 {
        return Err(Error::InvalidK { k });
    }
    let paths = all_st_arc_paths(g, limit)?;
    let tuples = (paths.len() as u128).checked_pow(k as u32);
    if tuples.is_none_or(|t| t > limit) {
        return Err(Error::PathExplosion { limit });
    }
    let on_path: Vec<Vec<bool>> = paths
        .iter()
        .map(|p| {
            let mut v = vec![false; g.arc_count()];
            for &a in p {
                v[a] = true;
            }
            v
        })
        .collect();
    let candidates: Vec<Vec<usize>> = required
        .iter()
        .map(|arcs| {
            (0..paths.len())
                .filter(|&p| arcs.iter().all(|&a| on_path[p][a]))
                .collect()
        })
        .collect();
    let free = k - required.len();
    let mut cache: HashMap<Vec<usize>, Option<Inner>> = HashMap::new();
    let mut best: Option<(Vec<usize>, f64)> = None;
    let mut fixed_choice = Vec::with_capacity(required.len());
    let mut visit = |slots: &[usize]| {
        let mut set = slots.to_vec();
        set.sort_unstable();
        set.dedup();
        let inner = cache
            .entry(set.clone())
            .or_insert_with(|| solve_inner(g, problem, &set, &on_path));
        if let Some(inner) = inner {
            if best.as_ref().is_none_or(|(_, v)| inner.objective < *v - 1e-12) {
                best = Some((slots.to_vec(), inner.objective));
            }
        }
    };
    enumerate_fixed(&candidates, &mut fixed_choice, &mut |fixed| {
        let size = free.min(paths.len());
        let mut combo: Vec<usize> = (0..size).collect();
        loop {
            let mut slots = fixed.to_vec();
            slots.extend(&combo);
            while slots.len() < k {
                slots.push(slots[0]);
            }
            visit(&slots);
            if !next_combination(&mut combo, paths.len()) {
                break;
            }
        }
    });
    let (slots, _) = best.ok_or(Error::Infeasible)?;
    let mut set = slots.clone();
    set.sort_unstable();
    set.dedup();
    let inner = cache[&set].as_ref().expect("best set was solved");
    let mut weights = vec![0.0; k];
    let mut slacks = vec![0.0; if problem == Problem::MinPathError { k } else { 0 }];
    for (pos, &p) in set.iter().enumerate() {
        let slot = slots.iter().position(|&s| s == p).expect("set comes from slots");
        weights[slot] = inner.weights[pos];
        if !slacks.is_empty() {
            slacks[slot] = inner.slacks[pos];
        }
    }
    Ok(PathSolution {
        paths: slots.iter().map(|&p| paths[p].clone()).collect(),
        weights,
        slacks,
        objective: inner.objective,
    })
}

fn enumerate_fixed(
    candidates: &[Vec<usize>],
    chosen: &mut Vec<usize>,
    f: &mut dyn FnMut(&[usize]),
) {
    if chosen.len() == candidates.len() {
        f(chosen);
        return;
    }
    for &p in &candidates[chosen.len()] {
        chosen.push(p);
        enumerate_fixed(candidates, chosen, f);
        chosen.pop();
    }
}

/// Advances `combo` to the next increasing combination over `0..n`.
fn next_combination(combo: &mut [usize], n: usize) -> bool {
    let r = combo.len();
    for i in (0..r).rev() {
        if combo[i] < n - r + i {
            combo[i] += 1;
            for j in i + 1..r {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Optimal weights (and slacks) for a fixed set of distinct paths.
fn solve_inner(g: &StDag, problem: Problem, set: &[usize], on_path: &[Vec<bool>]) -> Option<Inner> {
    let j = set.len();
    let data: Vec<ArcId> = (0..g.arc_count()).filter(|&a| g.is_data_arc(a)).collect();
    match problem {
        Problem::MinPathError => {
            let mut cons = Vec::with_capacity(2 * data.len());
            for &a in &data {
                let cover: Vec<bool> = set.iter().map(|&p| on_path[p][a]).collect();
                let mut lo = vec![0.0; 2 * j];
                let mut hi = vec![0.0; 2 * j];
                for (i, &c) in cover.iter().enumerate() {
                    if c {
                        lo[i] = 1.0;
                        lo[j + i] = 1.0;
                        hi[i] = 1.0;
                        hi[j + i] = -1.0;
                    }
                }
                let weight = g.arc(a).weight;
                cons.push(Constraint {
                    coefs: lo,
                    sense: Sense::Ge,
                    rhs: weight,
                });
                cons.push(Constraint {
                    coefs: hi,
                    sense: Sense::Le,
                    rhs: weight,
                });
            }
            let mut cost = vec![0.0; 2 * j];
            for c in &mut cost[j..] {
                *c = 1.0;
            }
            match minimize(&cost, &cons) {
                LpOutcome::Optimal { x, value } => Some(Inner {
                    weights: x[..j].to_vec(),
                    slacks: x[j..].to_vec(),
                    objective: value,
                }),
                LpOutcome::Infeasible => None,
                LpOutcome::Unbounded => unreachable!("slack costs are nonnegative"),
            }
        }
        Problem::LeastSquares => {
            let a = DMatrix::from_fn(data.len(), j, |r, c| {
                if on_path[set[c]][data[r]] {
                    1.0
                } else {
                    0.0
                }
            });
            let b = DVector::from_iterator(data.len(), data.iter().map(|&e| g.arc(e).weight));
            let w = nnls(&a, &b);
            let objective = (&a * &w - &b).norm_squared();
            Some(Inner {
                weights: w.iter().copied().collect(),
                slacks: Vec::new(),
                objective,
            })
        }
    }
}

/// Column assignment of `model` encoding `sol`, whose path `i` fills index
/// `i`.
pub fn assignment(g: &StDag, model: &IlpModel, sol: &PathSolution) -> Vec<f64> {
    let mut x = vec![0.0; model.lp.variables.len()];
    for (i0, path) in sol.paths.iter().enumerate() {
        let i = i0 + 1;
        x[model.w(i)] = sol.weights[i0];
        if let Some(rho) = model.rho(i) {
            x[rho] = sol.slacks[i0];
        }
        for &a in path {
            x[model.x(a, i)] = 1.0;
            x[model.p(a, i)] = sol.weights[i0];
            if let Some(q) = model.q(a, i) {
                x[q] = sol.slacks[i0];
            }
        }
    }
    for a in 0..model.arc_count {
        if let Some(r) = model.r(a) {
            let covered: f64 = (1..=model.k).map(|i| x[model.p(a, i)]).sum();
            x[r] = g.arc(a).weight - covered;
        }
    }
    x
}

/// Whether every path is an s-t path and, for MinPathError, every data
/// arc's residual is within the slack of the paths through it.
pub fn is_valid_solution(g: &StDag, problem: Problem, sol: &PathSolution, tol: f64) -> bool {
    let paths_ok = sol.paths.iter().all(|p| {
        !p.is_empty()
            && g.arc(p[0]).tail == g.source()
            && g.arc(*p.last().unwrap()).head == g.sink()
            && p.windows(2).all(|w| g.arc(w[0]).head == g.arc(w[1]).tail)
    });
    if !paths_ok || sol.weights.iter().any(|&w| w < -tol) {
        return false;
    }
    if problem == Problem::LeastSquares {
        return true;
    }
    (0..g.arc_count()).filter(|&a| g.is_data_arc(a)).all(|a| {
        let (mut covered, mut slack) = (0.0, 0.0);
        for (i, p) in sol.paths.iter().enumerate() {
            if p.contains(&a) {
                covered += sol.weights[i];
                slack += sol.slacks[i];
            }
        }
        (g.arc(a).weight - covered).abs() <= slack + tol
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::antichain::{select_fixing_sequences, SafetyMode};
    use crate::graph::{validate_st_dag, DiGraph};
    use crate::ilp::model::{apply_safety_fixing, build_model};

    fn weighted(n: usize, arcs: &[(usize, usize, f64)]) -> StDag {
        validate_st_dag(DiGraph::from_arcs(n, arcs.iter().copied()).unwrap(), 0, n - 1).unwrap()
    }

    #[test]
    fn forced_values() {
        let g = weighted(3, &[(0, 1, 3.0), (1, 2, 5.0)]);
        let mpe = solve_tiny(&g, 1, Problem::MinPathError, 1000).unwrap();
        assert!((mpe.objective - 1.0).abs() < 1e-9);
        assert!((mpe.weights[0] - 4.0).abs() < 1e-9);
        let lsq = solve_tiny(&g, 1, Problem::LeastSquares, 1000).unwrap();
        assert!((lsq.objective - 2.0).abs() < 1e-9);
        let g = weighted(3, &[(0, 1, 5.0), (1, 2, 5.0)]);
        let mpe = solve_tiny(&g, 1, Problem::MinPathError, 1000).unwrap();
        assert_eq!((mpe.weights[0], mpe.slacks[0], mpe.objective), (5.0, 0.0, 0.0));
    }

    #[test]
    fn diamond_exact_decomposition() {
        let g = weighted(4, &[(0, 1, 3.0), (0, 2, 7.0), (1, 3, 3.0), (2, 3, 7.0)]);
        let sol = solve_tiny(&g, 2, Problem::MinPathError, 1000).unwrap();
        assert_eq!(sol.objective, 0.0);
        assert!(is_valid_solution(&g, Problem::MinPathError, &sol, 1e-9));
        let mut ws = sol.weights.clone();
        ws.sort_by(f64::total_cmp);
        assert_eq!(ws, vec![3.0, 7.0]);
        let model = build_model(&g, 2, Problem::MinPathError).unwrap();
        let x = assignment(&g, &model, &sol);
        assert_eq!(model.lp.violation(&x, 1e-9), None);
        assert_eq!(model.lp.objective_value(&x), 0.0);
        assert_eq!(
            solve_tiny(&g, 1, Problem::MinPathError, 1000),
            Err(Error::Infeasible)
        );
    }

    #[test]
    fn fixed_model_keeps_optimum() {
        let g = weighted(4, &[(0, 1, 3.0), (0, 2, 7.0), (1, 3, 3.0), (2, 3, 7.0)]);
        let sel = select_fixing_sequences(&g, &SafetyMode::Arcs).unwrap();
        let model = apply_safety_fixing(build_model(&g, 2, Problem::LeastSquares).unwrap(), &sel).unwrap();
        let sol = solve_tiny_model(&g, &model, 1000).unwrap();
        assert!(sol.objective.abs() < 1e-9);
        assert_eq!(sol.paths[0], vec![0, 2]);
        let x = assignment(&g, &model, &sol);
        assert_eq!(model.lp.violation(&x, 1e-9), None);
    }

    #[test]
    fn explosion_guard() {
        let g = weighted(4, &[(0, 1, 1.0), (0, 2, 1.0), (1, 3, 1.0), (2, 3, 1.0)]);
        assert_eq!(
            solve_tiny(&g, 4, Problem::LeastSquares, 10),
            Err(Error::PathExplosion { limit: 10 })
        );
    }
}
