use std::fmt;
use std::str::FromStr;

use crate::antichain::{AntichainSelection, SafetyMode};
use crate::error::{Error, Result};
use crate::graph::{ArcId, StDag};

use super::lp::{LinearProgram, Sense, Variable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Problem {
    MinPathError,
    LeastSquares,
}

impl FromStr for Problem {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "mpe" => Ok(Problem::MinPathError),
            "lsq" => Ok(Problem::LeastSquares),
            other => Err(format!("unknown problem {:?} (expected mpe or lsq)", other)),
        }
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Problem::MinPathError => "mpe",
            Problem::LeastSquares => "lsq",
        })
    }
}

/// Variable `x[arc][path]` fixed to 1 because `path` hosts the `sequence`-th
/// attached safe sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FixRecord {
    pub sequence: usize,
    /// 1-based path index.
    pub path: usize,
    pub arc: ArcId,
    pub var: usize,
}

/// A k-path ILP over an s-t DAG with index maps from model entities to
/// program columns.
#[derive(Debug, Clone, PartialEq)]
pub struct IlpModel {
    pub problem: Problem,
    pub k: usize,
    pub arc_count: usize,
    pub big_m: f64,
    pub lp: LinearProgram,
    pub fixes: Vec<FixRecord>,
    x: Vec<usize>,
    w: Vec<usize>,
    rho: Vec<usize>,
    p: Vec<usize>,
    q: Vec<usize>,
    r: Vec<Option<usize>>,
}

impl IlpModel {
    /// Column of `x[arc][path]`, `path` 1-based.
    pub fn x(&self, arc: ArcId, path: usize) -> usize {
        self.x[(path - 1) * self.arc_count + arc]
    }

    pub fn w(&self, path: usize) -> usize {
        self.w[path - 1]
    }

    /// Slack column, MinPathError only.
    pub fn rho(&self, path: usize) -> Option<usize> {
        self.rho.get(path - 1).copied()
    }

    /// Column of the product `x[arc][path] * w[path]`.
    pub fn p(&self, arc: ArcId, path: usize) -> usize {
        self.p[(path - 1) * self.arc_count + arc]
    }

    /// Column of the product `x[arc][path] * rho[path]`, MinPathError only.
    pub fn q(&self, arc: ArcId, path: usize) -> Option<usize> {
        self.q.get((path - 1) * self.arc_count + arc).copied()
    }

    /// Residual column of a data arc, LeastSquares only.
    pub fn r(&self, arc: ArcId) -> Option<usize> {
        self.r.get(arc).copied().flatten()
    }

    pub fn binary_count(&self) -> usize {
        self.x.len()
    }
}

/// The k-path model. Every path leaves the source once and conserves flow
/// at internal nodes; products of binaries with continuous variables are
/// linearized with `M = sum of arc weights`. Arc error terms cover data
/// arcs only.
pub fn build_model(g: &StDag, k: usize, problem: Problem) -> Result<IlpModel> {
    if k < 1 {
        return Err(Error::InvalidK { k });
    }
    let m = g.arc_count();
    let big_m: f64 = g.arcs().iter().map(|a| a.weight).sum();
    let mut lp = LinearProgram {
        name: format!("{}_k{}", problem, k),
        ..Default::default()
    };
    let mut x = Vec::with_capacity(k * m);
    for i in 1..=k {
        for a in 0..m {
            x.push(lp.add_variable(Variable::binary(format!("x_{}_{}", a, i))));
        }
    }
    let w: Vec<usize> = (1..=k)
        .map(|i| lp.add_variable(Variable::nonnegative(format!("w_{}", i))))
        .collect();
    let rho: Vec<usize> = match problem {
        Problem::MinPathError => (1..=k)
            .map(|i| lp.add_variable(Variable::nonnegative(format!("rho_{}", i))))
            .collect(),
        Problem::LeastSquares => Vec::new(),
    };
    let product_vars = |lp: &mut LinearProgram, prefix: &str| -> Vec<usize> {
        let mut v = Vec::with_capacity(k * m);
        for i in 1..=k {
            for a in 0..m {
                v.push(lp.add_variable(Variable::nonnegative(format!("{}_{}_{}", prefix, a, i))));
            }
        }
        v
    };
    let p = product_vars(&mut lp, "p");
    let q = match problem {
        Problem::MinPathError => product_vars(&mut lp, "q"),
        Problem::LeastSquares => Vec::new(),
    };
    let r: Vec<Option<usize>> = match problem {
        Problem::LeastSquares => (0..m)
            .map(|a| {
                g.is_data_arc(a)
                    .then(|| lp.add_variable(Variable::free(format!("r_{}", a))))
            })
            .collect(),
        Problem::MinPathError => Vec::new(),
    };
    let xi = |a: usize, i: usize| x[(i - 1) * m + a];
    for i in 1..=k {
        let terms = g.out_arcs(g.source()).iter().map(|&a| (xi(a, i), 1.0)).collect();
        lp.add_row(format!("src_{}", i), terms, Sense::Eq, 1.0);
        for &v in g.topo_order() {
            if v == g.source() || v == g.sink() {
                continue;
            }
            let mut terms: Vec<(usize, f64)> =
                g.in_arcs(v).iter().map(|&a| (xi(a, i), 1.0)).collect();
            terms.extend(g.out_arcs(v).iter().map(|&a| (xi(a, i), -1.0)));
            lp.add_row(format!("flow_{}_{}", v, i), terms, Sense::Eq, 0.0);
        }
    }
    let linearize = |lp: &mut LinearProgram, prefix: &str, prod: &[usize], cont: &[usize]| {
        for i in 1..=k {
            for a in 0..m {
                let (pv, xv, cv) = (prod[(i - 1) * m + a], xi(a, i), cont[i - 1]);
                let tag = format!("{}_{}_{}", prefix, a, i);
                lp.add_row(format!("{}_mx", tag), vec![(pv, 1.0), (xv, -big_m)], Sense::Le, 0.0);
                lp.add_row(format!("{}_mc", tag), vec![(pv, 1.0), (cv, -1.0)], Sense::Le, 0.0);
                lp.add_row(
                    format!("{}_lb", tag),
                    vec![(pv, 1.0), (cv, -1.0), (xv, -big_m)],
                    Sense::Ge,
                    -big_m,
                );
            }
        }
    };
    linearize(&mut lp, "p", &p, &w);
    if problem == Problem::MinPathError {
        linearize(&mut lp, "q", &q, &rho);
    }
    for a in (0..m).filter(|&a| g.is_data_arc(a)) {
        let weight = g.arc(a).weight;
        let ps: Vec<(usize, f64)> = (1..=k).map(|i| (p[(i - 1) * m + a], 1.0)).collect();
        match problem {
            Problem::MinPathError => {
                let qs = (1..=k).map(|i| q[(i - 1) * m + a]);
                let mut lo = ps.clone();
                lo.extend(qs.clone().map(|v| (v, 1.0)));
                lp.add_row(format!("err_lo_{}", a), lo, Sense::Ge, weight);
                let mut hi = ps;
                hi.extend(qs.map(|v| (v, -1.0)));
                lp.add_row(format!("err_hi_{}", a), hi, Sense::Le, weight);
            }
            Problem::LeastSquares => {
                let mut terms = ps;
                terms.push((r[a].expect("data arcs have residuals"), 1.0));
                lp.add_row(format!("res_{}", a), terms, Sense::Eq, weight);
            }
        }
    }
    match problem {
        Problem::MinPathError => lp.objective = rho.iter().map(|&v| (v, 1.0)).collect(),
        Problem::LeastSquares => lp.quadratic = r.iter().flatten().map(|&v| (v, 2.0)).collect(),
    }
    Ok(IlpModel {
        problem,
        k,
        arc_count: m,
        big_m,
        lp,
        fixes: Vec::new(),
        x,
        w,
        rho,
        p,
        q,
        r,
    })
}

/// Fixes `x[arc][i] = 1` for every arc of the `i`-th attached sequence.
pub fn apply_safety_fixing(mut model: IlpModel, selection: &AntichainSelection) -> Result<IlpModel> {
    let t = selection.attached_sequences.len();
    if t > model.k {
        return Err(Error::TooManySequences {
            sequences: t,
            k: model.k,
        });
    }
    for (s, seq) in selection.attached_sequences.iter().enumerate() {
        let path = s + 1;
        for &arc in &seq.fixed_arcs {
            if arc >= model.arc_count {
                return Err(Error::ArcOutOfRange {
                    arc,
                    arc_count: model.arc_count,
                });
            }
            let var = model.x(arc, path);
            if model.fixes.iter().any(|f| f.var == var) {
                continue;
            }
            let v = &mut model.lp.variables[var];
            v.lower = 1.0;
            v.upper = 1.0;
            model.fixes.push(FixRecord {
                sequence: s,
                path,
                arc,
                var,
            });
        }
    }
    Ok(model)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixingStatistics {
    pub fixed: usize,
    pub total: usize,
    pub percentage: f64,
}

/// Share of the `m * k` arc variables fixed to 1.
pub fn fixing_statistics(model: &IlpModel) -> FixingStatistics {
    let total = model.binary_count();
    let fixed = model.fixes.len();
    FixingStatistics {
        fixed,
        total,
        percentage: if total == 0 {
            0.0
        } else {
            100.0 * fixed as f64 / total as f64
        },
    }
}

/// Data arcs whose weight is at least the nearest-rank `q`-th percentile of
/// all data-arc weights.
pub fn percentile_subset(g: &StDag, q: f64) -> Result<Vec<ArcId>> {
    if !(0.0..=100.0).contains(&q) {
        return Err(Error::InvalidPercentile { q });
    }
    let data: Vec<ArcId> = (0..g.arc_count()).filter(|&a| g.is_data_arc(a)).collect();
    if data.is_empty() {
        return Ok(Vec::new());
    }
    let mut weights: Vec<f64> = data.iter().map(|&a| g.arc(a).weight).collect();
    weights.sort_by(f64::total_cmp);
    let rank = ((q / 100.0 * weights.len() as f64).ceil() as usize).max(1);
    let threshold = weights[rank - 1];
    Ok(data
        .into_iter()
        .filter(|&a| g.arc(a).weight >= threshold)
        .collect())
}

/// How much safety information feeds the fixing step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SafetyLevel {
    None,
    /// Safe for covers of every arc that must be covered (positive weight).
    Full,
    /// Safe for covers of the arcs at or above a weight percentile.
    Percentile(f64),
}

impl FromStr for SafetyLevel {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "none" => Ok(SafetyLevel::None),
            "full" => Ok(SafetyLevel::Full),
            _ => s
                .strip_prefix("subset:")
                .and_then(|q| q.parse().ok())
                .filter(|q: &f64| (0.0..=100.0).contains(q))
                .map(SafetyLevel::Percentile)
                .ok_or_else(|| format!("invalid safety {:?} (none, full or subset:<0-100>)", s)),
        }
    }
}

/// The safety mode a level maps to on `g`. `Full` uses all arcs when every
/// arc is a data arc of positive weight, and the positive-weight data arcs
/// otherwise, since only those must lie on a solution path.
pub fn safety_mode(g: &StDag, level: SafetyLevel) -> Result<Option<SafetyMode>> {
    Ok(match level {
        SafetyLevel::None => None,
        SafetyLevel::Full => {
            let required: Vec<ArcId> = (0..g.arc_count())
                .filter(|&a| g.is_data_arc(a) && g.arc(a).weight > 0.0)
                .collect();
            if required.len() == g.arc_count() {
                Some(SafetyMode::Arcs)
            } else {
                Some(SafetyMode::ArcSubset(required))
            }
        }
        SafetyLevel::Percentile(q) => Some(SafetyMode::ArcSubset(percentile_subset(g, q)?)),
    })
}
