//! Per-graph work for the `safety` and `ilp` commands. Each graph is handled
//! on its own: failures become report records instead of aborting the batch.

use std::collections::HashMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use safeseq::antichain::{arc_width, select_fixing_sequences, SafetyMode};
use safeseq::format::NamedGraph;
use safeseq::graph::{into_st_dag, StDag};
use safeseq::ilp::{
    apply_safety_fixing, build_model, export_model, fixing_statistics, percentile_subset,
    safety_mode, solve_tiny, solve_tiny_model, ExportFormat, Problem, SafetyLevel,
};
use safeseq::safety::{
    arc_sequences_json, arc_sequences_tsv, is_subsequence, maximal_safe_arc_sequences,
    maximal_safe_arc_sequences_subset, maximal_safe_sequences, maximal_safe_sequences_subset,
    node_sequences_json, node_sequences_tsv,
};
use safeseq::{ArcId, Error, NodeId};

use crate::report::Record;

pub const STATUS_OK: &str = "ok";
pub const STATUS_INPUT: &str = "input-error";
pub const STATUS_ERROR: &str = "error";
pub const STATUS_INTERNAL: &str = "internal-error";

/// Objectives of fixed and unfixed MinPathError models must agree this
/// closely.
const OBJECTIVE_TOLERANCE: f64 = 1e-6;

#[derive(Debug)]
pub enum Failure {
    /// The graph itself is unusable (parse or shape errors).
    Input(String),
    /// A well-formed graph that the requested pipeline cannot handle.
    Domain(String),
    /// A broken internal invariant.
    Internal(String),
}

impl Failure {
    fn status(&self) -> &'static str {
        match self {
            Failure::Input(_) => STATUS_INPUT,
            Failure::Domain(_) => STATUS_ERROR,
            Failure::Internal(_) => STATUS_INTERNAL,
        }
    }

    fn message(self) -> String {
        match self {
            Failure::Input(m) | Failure::Domain(m) | Failure::Internal(m) => m,
        }
    }
}

fn domain(e: Error) -> Failure {
    Failure::Domain(e.to_string())
}

/// Runs `f` on one parsed graph, turning parse errors, failures and panics
/// into a failed record.
pub fn isolate<T>(
    index: usize,
    parsed: &safeseq::Result<NamedGraph>,
    f: impl FnOnce(&NamedGraph) -> Result<(Record, T), Failure>,
) -> (Record, Option<T>) {
    let named = match parsed {
        Ok(named) => named,
        Err(e) => return (Record::failed(index, "-", STATUS_INPUT, e.to_string()), None),
    };
    let outcome = catch_unwind(AssertUnwindSafe(|| f(named))).unwrap_or_else(|panic| {
        let msg = panic
            .downcast_ref::<&str>()
            .map(|s| s.to_string())
            .or_else(|| panic.downcast_ref::<String>().cloned())
            .unwrap_or_else(|| "panic".to_string());
        Err(Failure::Internal(msg))
    });
    match outcome {
        Ok((record, extra)) => (record, Some(extra)),
        Err(failure) => {
            let status = failure.status();
            (Record::failed(index, &named.name, status, failure.message()), None)
        }
    }
}

fn prepare(named: &NamedGraph) -> Result<StDag, Failure> {
    into_st_dag(named.graph.clone()).map_err(|e| Failure::Input(e.to_string()))
}

/// Drops the items `keep` rejects (the nodes or arcs added to give the
/// graph a single source and sink), then removes sequences that became
/// empty or contained in another one. Only shortened sequences can become
/// redundant, so only those are checked.
pub fn strip_sequences<T: Copy + PartialEq>(seqs: Vec<Vec<T>>, keep: impl Fn(T) -> bool) -> Vec<Vec<T>> {
    let stripped: Vec<(bool, Vec<T>)> = seqs
        .into_iter()
        .map(|s| {
            let kept: Vec<T> = s.iter().copied().filter(|&x| keep(x)).collect();
            (kept.len() != s.len(), kept)
        })
        .collect();
    let mut out = Vec::with_capacity(stripped.len());
    for (i, (changed, s)) in stripped.iter().enumerate() {
        if s.is_empty() {
            continue;
        }
        let redundant = *changed
            && stripped.iter().enumerate().any(|(j, (_, o))| {
                j != i && is_subsequence(s, o) && (o.len() > s.len() || j < i)
            });
        if !redundant {
            out.push(s.clone());
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Nodes,
    Arcs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Tsv,
    Json,
}

#[derive(Debug, Clone)]
pub enum Subset {
    Full,
    Percentile(f64),
    /// Ids per graph name; graphs not listed get an empty set.
    Explicit(HashMap<String, Vec<usize>>),
}

pub struct SafetyOptions {
    pub mode: Mode,
    pub subset: Subset,
    pub format: OutputFormat,
}

/// Parses `graph name<TAB>id id ...` lines.
pub fn parse_subset_file(text: &str) -> Result<HashMap<String, Vec<usize>>> {
    let mut out: HashMap<String, Vec<usize>> = HashMap::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let Some((name, ids)) = line.rsplit_once('\t') else {
            bail!("line {}: expected `graph name<TAB>ids`", i + 1);
        };
        let ids: Vec<usize> = ids
            .split_whitespace()
            .map(|x| x.parse())
            .collect::<std::result::Result<_, _>>()
            .with_context(|| format!("line {}: invalid id list {:?}", i + 1, ids))?;
        if out.insert(name.to_string(), ids).is_some() {
            bail!("line {}: graph {:?} listed twice", i + 1, name);
        }
    }
    Ok(out)
}

/// Safe sequences of one graph in the requested mode, as node or arc lists
/// over the input graph, with the time spent in the safety call.
fn safety_sequences(
    g: &StDag,
    named: &NamedGraph,
    opts: &SafetyOptions,
) -> Result<(Vec<Vec<usize>>, f64), Failure> {
    let n = named.graph.node_count();
    let m = named.graph.arc_count();
    let start = Instant::now();
    let raw: Vec<Vec<usize>> = match (&opts.subset, opts.mode) {
        (Subset::Full, Mode::Nodes) => maximal_safe_sequences(g).node_lists(),
        (Subset::Full, Mode::Arcs) => arc_lists(maximal_safe_arc_sequences(g)),
        (Subset::Percentile(q), Mode::Arcs) => {
            let c = percentile_subset(g, *q).map_err(domain)?;
            arc_lists(maximal_safe_arc_sequences_subset(g, &c).map_err(domain)?)
        }
        (Subset::Percentile(_), Mode::Nodes) => {
            return Err(Failure::Domain("percentile subsets apply to arcs mode".into()))
        }
        (Subset::Explicit(map), mode) => {
            let c = map.get(&named.name).cloned().unwrap_or_default();
            let limit = if mode == Mode::Nodes { n } else { m };
            if let Some(&bad) = c.iter().find(|&&x| x >= limit) {
                return Err(Failure::Input(format!(
                    "subset id {} is out of range for a graph with {} {}",
                    bad,
                    limit,
                    if mode == Mode::Nodes { "nodes" } else { "arcs" }
                )));
            }
            match mode {
                Mode::Nodes => maximal_safe_sequences_subset(g, &c).map_err(domain)?.node_lists(),
                Mode::Arcs => arc_lists(maximal_safe_arc_sequences_subset(g, &c).map_err(domain)?),
            }
        }
    };
    let seconds = start.elapsed().as_secs_f64();
    let seqs = match opts.mode {
        Mode::Nodes => strip_sequences(raw, |v: NodeId| v < n),
        Mode::Arcs => strip_sequences(raw, |a: ArcId| a < m),
    };
    Ok((seqs, seconds))
}

fn arc_lists(seqs: Vec<safeseq::safety::ArcSafeSequence>) -> Vec<Vec<ArcId>> {
    seqs.into_iter().map(|s| s.arcs).collect()
}

/// Record and rendered sequences for one graph.
pub fn run_safety(index: usize, named: &NamedGraph, opts: &SafetyOptions) -> Result<(Record, String), Failure> {
    let g = prepare(named)?;
    let (seqs, seconds) = safety_sequences(&g, named, opts)?;
    let content = match (opts.mode, opts.format) {
        (Mode::Nodes, OutputFormat::Tsv) => node_sequences_tsv(&named.name, &seqs),
        (Mode::Arcs, OutputFormat::Tsv) => arc_sequences_tsv(&g, &named.name, &seqs),
        (Mode::Nodes, OutputFormat::Json) => node_sequences_json(&named.name, &seqs) + "\n",
        (Mode::Arcs, OutputFormat::Json) => arc_sequences_json(&named.name, &seqs) + "\n",
    };
    let record = Record {
        index,
        graph: named.name.clone(),
        status: STATUS_OK.into(),
        n: named.graph.node_count(),
        m: named.graph.arc_count(),
        width: Some(arc_width(&g)),
        prep_seconds: seconds,
        sequences: seqs.len(),
        total_length: seqs.iter().map(Vec::len).sum(),
        ..Record::default()
    };
    Ok((record, content))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KChoice {
    Auto,
    Fixed(usize),
}

impl std::str::FromStr for KChoice {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s == "auto" {
            return Ok(KChoice::Auto);
        }
        match s.parse() {
            Ok(k) if k >= 1 => Ok(KChoice::Fixed(k)),
            _ => Err(format!("invalid k {:?} (auto or a positive integer)", s)),
        }
    }
}

pub struct IlpOptions {
    pub problem: Problem,
    pub safety: SafetyLevel,
    pub k: KChoice,
    pub export: ExportFormat,
    pub solve_tiny: bool,
    pub path_limit: u128,
}

/// Record and exported model for one graph.
pub fn run_ilp(index: usize, named: &NamedGraph, opts: &IlpOptions) -> Result<(Record, String), Failure> {
    let g = prepare(named)?;
    let width = arc_width(&g);
    let k = match opts.k {
        KChoice::Auto => width.max(1),
        KChoice::Fixed(k) => k,
    };
    let mut model = build_model(&g, k, opts.problem).map_err(domain)?;

    let start = Instant::now();
    let mode = safety_mode(&g, opts.safety).map_err(domain)?;
    let selection = mode
        .as_ref()
        .map(|mode| select_fixing_sequences(&g, mode))
        .transpose()
        .map_err(domain)?;
    let seconds = if mode.is_some() { start.elapsed().as_secs_f64() } else { 0.0 };
    if let Some(selection) = &selection {
        model = apply_safety_fixing(model, selection).map_err(domain)?;
    }

    let m = named.graph.arc_count();
    let seqs: Vec<Vec<ArcId>> = match &mode {
        None => Vec::new(),
        Some(SafetyMode::ArcSubset(c)) => arc_lists(maximal_safe_arc_sequences_subset(&g, c).map_err(domain)?),
        Some(_) => arc_lists(maximal_safe_arc_sequences(&g)),
    };
    let seqs = strip_sequences(seqs, |a: ArcId| a < m);

    let stats = fixing_statistics(&model);
    if !(0.0..=100.0).contains(&stats.percentage) || stats.fixed > stats.total {
        return Err(Failure::Internal(format!(
            "fixed {} of {} variables ({}%)",
            stats.fixed, stats.total, stats.percentage
        )));
    }

    let mut record = Record {
        index,
        graph: named.name.clone(),
        status: STATUS_OK.into(),
        n: named.graph.node_count(),
        m,
        width: Some(width),
        k: Some(k),
        prep_seconds: seconds,
        sequences: seqs.len(),
        total_length: seqs.iter().map(Vec::len).sum(),
        fixed: Some(stats.fixed),
        binaries: Some(stats.total),
        fixed_pct: Some(stats.percentage),
        ..Record::default()
    };

    if opts.solve_tiny {
        let unfixed = solve_tiny(&g, k, opts.problem, opts.path_limit);
        let fixed = solve_tiny_model(&g, &model, opts.path_limit);
        let mut notes = Vec::new();
        match (&unfixed, &fixed) {
            (Err(Error::PathExplosion { limit }), _) | (_, Err(Error::PathExplosion { limit })) => {
                notes.push(format!("solve-tiny skipped: more than {} path tuples", limit));
            }
            _ => {
                for (label, r, slot) in [
                    ("unfixed", &unfixed, &mut record.objective_unfixed),
                    ("fixed", &fixed, &mut record.objective_fixed),
                ] {
                    match r {
                        Ok(sol) => *slot = Some(sol.objective),
                        Err(e) => notes.push(format!("{} model: {}", label, e)),
                    }
                }
            }
        }
        if let (Some(u), Some(f)) = (record.objective_unfixed, record.objective_fixed) {
            let scale = 1.0 + u.abs();
            if f < u - OBJECTIVE_TOLERANCE * scale {
                return Err(Failure::Internal(format!(
                    "fixed objective {} below unfixed objective {}",
                    f, u
                )));
            }
            if f > u + OBJECTIVE_TOLERANCE * scale {
                if opts.problem == Problem::MinPathError {
                    return Err(Failure::Internal(format!(
                        "safety fixing raised the MinPathError objective from {} to {}",
                        u, f
                    )));
                }
                notes.push("fixed optimum is worse: the unfixed optimum does not cover the subset".into());
            }
        }
        record.note = notes.join("; ");
    }
    Ok((record, export_model(&model, opts.export)))
}

pub fn read_input(path: &Path) -> Result<Vec<safeseq::Result<NamedGraph>>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(safeseq::format::read_graphs(&text))
}
