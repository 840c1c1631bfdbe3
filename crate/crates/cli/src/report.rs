//! Per-graph run records, their TSV form, and width-bucketed aggregation.

use std::fmt::Write as _;

use anyhow::{bail, Context, Result};

pub const COLUMNS: [&str; 16] = [
    "index",
    "graph",
    "status",
    "n",
    "m",
    "width",
    "k",
    "prep_seconds",
    "sequences",
    "total_length",
    "fixed",
    "binaries",
    "fixed_pct",
    "objective_unfixed",
    "objective_fixed",
    "note",
];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Record {
    pub index: usize,
    pub graph: String,
    /// `ok`, `input-error`, `error` or `internal-error`.
    pub status: String,
    pub n: usize,
    pub m: usize,
    pub width: Option<usize>,
    pub k: Option<usize>,
    pub prep_seconds: f64,
    pub sequences: usize,
    pub total_length: usize,
    pub fixed: Option<usize>,
    pub binaries: Option<usize>,
    pub fixed_pct: Option<f64>,
    pub objective_unfixed: Option<f64>,
    pub objective_fixed: Option<f64>,
    pub note: String,
}

impl Record {
    pub fn failed(index: usize, graph: &str, status: &str, note: String) -> Self {
        Record {
            index,
            graph: graph.to_string(),
            status: status.to_string(),
            note,
            ..Record::default()
        }
    }

    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

fn opt<T: ToString>(x: &Option<T>) -> String {
    x.as_ref().map_or_else(|| "-".to_string(), T::to_string)
}

/// Objectives rounded to nine decimals, so solver noise does not leak into
/// reports.
fn objective(x: &Option<f64>) -> String {
    x.map_or_else(|| "-".to_string(), |v| ((v * 1e9).round() / 1e9 + 0.0).to_string())
}

fn clean(s: &str) -> String {
    s.replace(['\t', '\n', '\r'], " ")
}

pub fn to_tsv(records: &[Record]) -> String {
    let mut out = COLUMNS.join("\t");
    out.push('\n');
    for r in records {
        let fields = [
            r.index.to_string(),
            clean(&r.graph),
            r.status.clone(),
            r.n.to_string(),
            r.m.to_string(),
            opt(&r.width),
            opt(&r.k),
            format!("{:.6}", r.prep_seconds),
            r.sequences.to_string(),
            r.total_length.to_string(),
            opt(&r.fixed),
            opt(&r.binaries),
            r.fixed_pct.map_or_else(|| "-".to_string(), |p| format!("{:.4}", p)),
            objective(&r.objective_unfixed),
            objective(&r.objective_fixed),
            if r.note.is_empty() { "-".to_string() } else { clean(&r.note) },
        ];
        out.push_str(&fields.join("\t"));
        out.push('\n');
    }
    out
}

fn parse_opt<T: std::str::FromStr>(s: &str) -> Result<Option<T>, T::Err> {
    if s == "-" {
        Ok(None)
    } else {
        s.parse().map(Some)
    }
}

/// Parses a report written by [`to_tsv`]. Empty text is an empty report.
pub fn from_tsv(text: &str) -> Result<Vec<Record>> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let Some((_, header)) = lines.next() else {
        return Ok(Vec::new());
    };
    if header.split('\t').collect::<Vec<_>>() != COLUMNS {
        bail!("line 1: unexpected report header");
    }
    let mut out = Vec::new();
    for (i, line) in lines {
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != COLUMNS.len() {
            bail!("line {}: expected {} fields, got {}", i + 1, COLUMNS.len(), f.len());
        }
        let parse = || -> Result<Record> {
            Ok(Record {
                index: f[0].parse()?,
                graph: f[1].to_string(),
                status: f[2].to_string(),
                n: f[3].parse()?,
                m: f[4].parse()?,
                width: parse_opt(f[5])?,
                k: parse_opt(f[6])?,
                prep_seconds: f[7].parse()?,
                sequences: f[8].parse()?,
                total_length: f[9].parse()?,
                fixed: parse_opt(f[10])?,
                binaries: parse_opt(f[11])?,
                fixed_pct: parse_opt(f[12])?,
                objective_unfixed: parse_opt(f[13])?,
                objective_fixed: parse_opt(f[14])?,
                note: if f[15] == "-" { String::new() } else { f[15].to_string() },
            })
        };
        out.push(parse().with_context(|| format!("line {}", i + 1))?);
    }
    Ok(out)
}

/// Inclusive width interval; `hi == None` is open-ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bucket {
    pub lo: usize,
    pub hi: Option<usize>,
}

impl Bucket {
    pub fn contains(&self, w: usize) -> bool {
        w >= self.lo && self.hi.is_none_or(|h| w <= h)
    }

    pub fn label(&self) -> String {
        match self.hi {
            Some(h) => format!("{}-{}", self.lo, h),
            None => format!("{}+", self.lo),
        }
    }
}

pub const DEFAULT_BUCKETS: &str = "1-3,4-6,7-9,10+";

/// Parses `1-3,4-6,10+` style lists.
pub fn parse_buckets(s: &str) -> Result<Vec<Bucket>, String> {
    s.split(',')
        .map(|part| {
            let part = part.trim();
            let bad = || format!("invalid width bucket {:?} (expected lo-hi or lo+)", part);
            if let Some(lo) = part.strip_suffix('+') {
                Ok(Bucket {
                    lo: lo.parse().map_err(|_| bad())?,
                    hi: None,
                })
            } else {
                let (lo, hi) = part.split_once('-').ok_or_else(bad)?;
                let (lo, hi): (usize, usize) =
                    (lo.parse().map_err(|_| bad())?, hi.parse().map_err(|_| bad())?);
                if lo > hi {
                    return Err(bad());
                }
                Ok(Bucket { lo, hi: Some(hi) })
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub bucket: String,
    pub graphs: usize,
    pub avg_m: f64,
    pub max_m: usize,
    pub avg_prep_seconds: f64,
    /// Mean fixed-variable percentage over graphs that have one.
    pub avg_fixed_pct: Option<f64>,
}

/// One row per nonempty bucket, over successful records with a width.
/// Widths outside every bucket are counted in an `other` row.
pub fn aggregate(records: &[Record], buckets: &[Bucket]) -> Vec<AggregateRow> {
    let labels: Vec<String> = buckets.iter().map(Bucket::label).chain(["other".to_string()]).collect();
    let mut groups: Vec<Vec<&Record>> = vec![Vec::new(); labels.len()];
    for r in records.iter().filter(|r| r.is_ok()) {
        let Some(w) = r.width else { continue };
        let slot = buckets.iter().position(|b| b.contains(w)).unwrap_or(buckets.len());
        groups[slot].push(r);
    }
    labels
        .into_iter()
        .zip(groups)
        .filter(|(_, g)| !g.is_empty())
        .map(|(bucket, g)| {
            let count = g.len() as f64;
            let pcts: Vec<f64> = g.iter().filter_map(|r| r.fixed_pct).collect();
            AggregateRow {
                bucket,
                graphs: g.len(),
                avg_m: g.iter().map(|r| r.m as f64).sum::<f64>() / count,
                max_m: g.iter().map(|r| r.m).max().unwrap_or(0),
                avg_prep_seconds: g.iter().map(|r| r.prep_seconds).sum::<f64>() / count,
                avg_fixed_pct: (!pcts.is_empty())
                    .then(|| pcts.iter().sum::<f64>() / pcts.len() as f64),
            }
        })
        .collect()
}

fn row_fields(r: &AggregateRow) -> [String; 6] {
    [
        r.bucket.clone(),
        r.graphs.to_string(),
        format!("{:.1}", r.avg_m),
        r.max_m.to_string(),
        format!("{:.6}", r.avg_prep_seconds),
        r.avg_fixed_pct.map_or_else(|| "-".to_string(), |p| format!("{:.2}", p)),
    ]
}

const AGG_HEADER: [&str; 6] = ["width", "#g", "avg m", "max m", "prep", "vars%"];

pub fn aggregate_tsv(rows: &[AggregateRow]) -> String {
    let mut out = AGG_HEADER.join("\t");
    out.push('\n');
    for r in rows {
        out.push_str(&row_fields(r).join("\t"));
        out.push('\n');
    }
    out
}

pub fn aggregate_markdown(rows: &[AggregateRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "| {} |", AGG_HEADER.join(" | "));
    let _ = writeln!(out, "|{}", "---|".repeat(AGG_HEADER.len()));
    for r in rows {
        let _ = writeln!(out, "| {} |", row_fields(r).join(" | "));
    }
    out
}
