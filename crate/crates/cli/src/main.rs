//! `safeseq`: batch safe-sequence enumeration, safety-fixed ILP export and
//! width-bucketed statistics over `.graph` files.
//!
//! Exit codes: 0 on success, 1 when an input (file, flag or graph) could not
//! be parsed or processed, 2 when an internal invariant was violated.

mod pipeline;
mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use safeseq::ilp::{ExportFormat, Problem, SafetyLevel};

use pipeline::{
    isolate, parse_subset_file, read_input, run_ilp, run_safety, IlpOptions, KChoice, Mode,
    OutputFormat, SafetyOptions, Subset, STATUS_INTERNAL, STATUS_OK,
};
use report::{aggregate, aggregate_markdown, aggregate_tsv, parse_buckets, Record};

const PATH_LIMIT_VAR: &str = "SAFESEQ_PATH_LIMIT";

#[derive(Parser)]
#[command(name = "safeseq", version, about = "Maximal safe sequences and safety-fixed path-cover ILPs")]
struct Cli {
    /// Worker threads across graphs (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate maximal safe sequences of every graph in a file.
    Safety(SafetyArgs),
    /// Build one path-cover ILP per graph, optionally fixed by safety.
    Ilp(IlpArgs),
    /// Aggregate run reports by arc-width bucket.
    Stats(StatsArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Nodes,
    Arcs,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Tsv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum TableFormat {
    Tsv,
    Markdown,
}

#[derive(clap::Args)]
struct SafetyArgs {
    /// Input `.graph` file.
    input: PathBuf,
    #[arg(long, value_enum, default_value = "nodes")]
    mode: ModeArg,
    /// Restrict to covers of the arcs weighing at least this percentile
    /// (arcs mode).
    #[arg(long, value_name = "Q", conflicts_with = "subset_file")]
    subset_percentile: Option<f64>,
    /// Lines `graph name<TAB>ids` giving the nodes or arcs to cover.
    #[arg(long, value_name = "PATH")]
    subset_file: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "tsv")]
    format: FormatArg,
    /// Directory for `sequences.tsv|jsonl` and `report.tsv`; sequences go to
    /// stdout when absent.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct IlpArgs {
    /// Input `.graph` file.
    input: PathBuf,
    /// mpe (MinPathError) or lsq (LeastSquares).
    #[arg(long, default_value = "mpe")]
    problem: Problem,
    /// none, full or subset:Q (arcs at or above the Q-th weight percentile).
    #[arg(long, default_value = "full")]
    safety: SafetyLevel,
    /// Number of paths: auto (the arc-width) or a positive integer.
    #[arg(long, default_value = "auto")]
    k: KChoice,
    #[arg(long, default_value = "lp")]
    export: ExportFormat,
    /// Solve fixed and unfixed models exactly when the path count allows.
    #[arg(long)]
    solve_tiny: bool,
    /// Directory for one model file per graph plus `report.tsv` and
    /// `summary.tsv`.
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
}

#[derive(clap::Args)]
struct StatsArgs {
    /// Report files written by `safety` or `ilp`.
    reports: Vec<PathBuf>,
    /// Comma-separated width intervals.
    #[arg(long, default_value = report::DEFAULT_BUCKETS)]
    buckets: String,
    #[arg(long, value_enum, default_value = "tsv")]
    format: TableFormat,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {:#}", e);
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build()?;
    pool.install(|| match cli.command {
        Command::Safety(args) => cmd_safety(args),
        Command::Ilp(args) => cmd_ilp(args),
        Command::Stats(args) => cmd_stats(args),
    })
}

fn path_limit() -> Result<u128> {
    match std::env::var(PATH_LIMIT_VAR) {
        Ok(v) => v
            .trim()
            .parse()
            .with_context(|| format!("{} must be a nonnegative integer, got {:?}", PATH_LIMIT_VAR, v)),
        Err(_) => Ok(safeseq::DEFAULT_PATH_LIMIT),
    }
}

/// Exit code for a finished batch, reporting failed graphs on stderr.
fn batch_exit(records: &[Record]) -> ExitCode {
    let mut code = 0;
    for r in records.iter().filter(|r| r.status != STATUS_OK) {
        eprintln!("graph {} ({}): {}: {}", r.index, r.graph, r.status, r.note);
        code = code.max(if r.status == STATUS_INTERNAL { 2 } else { 1 });
    }
    ExitCode::from(code)
}

fn timing_line(records: &[Record]) -> String {
    let ok: Vec<&Record> = records.iter().filter(|r| r.is_ok()).collect();
    let total: f64 = ok.iter().map(|r| r.prep_seconds).sum();
    let avg = if ok.is_empty() { 0.0 } else { total / ok.len() as f64 };
    format!(
        "prep {:.6}s total, {:.6}s average over {} graphs ({} failed)",
        total,
        avg,
        ok.len(),
        records.len() - ok.len()
    )
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn write(path: &Path, content: &str) -> Result<()> {
    fs::write(path, content).with_context(|| format!("writing {}", path.display()))
}

fn cmd_safety(args: SafetyArgs) -> Result<ExitCode> {
    let mode = match args.mode {
        ModeArg::Nodes => Mode::Nodes,
        ModeArg::Arcs => Mode::Arcs,
    };
    let subset = match (args.subset_percentile, &args.subset_file) {
        (Some(q), _) => {
            anyhow::ensure!(mode == Mode::Arcs, "--subset-percentile requires --mode arcs");
            anyhow::ensure!((0.0..=100.0).contains(&q), "--subset-percentile must lie in [0, 100]");
            Subset::Percentile(q)
        }
        (None, Some(path)) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            Subset::Explicit(parse_subset_file(&text).with_context(|| path.display().to_string())?)
        }
        (None, None) => Subset::Full,
    };
    let format = match args.format {
        FormatArg::Tsv => OutputFormat::Tsv,
        FormatArg::Json => OutputFormat::Json,
    };
    let opts = SafetyOptions { mode, subset, format };
    let graphs = read_input(&args.input)?;
    let results: Vec<(Record, Option<String>)> = graphs
        .par_iter()
        .enumerate()
        .map(|(i, parsed)| isolate(i, parsed, |named| run_safety(i, named, &opts)))
        .collect();
    let content: String = results.iter().filter_map(|(_, c)| c.as_deref()).collect();
    let records: Vec<Record> = results.into_iter().map(|(r, _)| r).collect();
    match &args.out {
        Some(dir) => {
            create_dir(dir)?;
            let name = match format {
                OutputFormat::Tsv => "sequences.tsv",
                OutputFormat::Json => "sequences.jsonl",
            };
            write(&dir.join(name), &content)?;
            write(&dir.join("report.tsv"), &report::to_tsv(&records))?;
        }
        None => print!("{}", content),
    }
    eprintln!("{}", timing_line(&records));
    Ok(batch_exit(&records))
}

fn cmd_ilp(args: IlpArgs) -> Result<ExitCode> {
    let opts = IlpOptions {
        problem: args.problem,
        safety: args.safety,
        k: args.k,
        export: args.export,
        solve_tiny: args.solve_tiny,
        path_limit: path_limit()?,
    };
    let ext = match args.export {
        ExportFormat::Lp => "lp",
        ExportFormat::Mps => "mps",
    };
    let graphs = read_input(&args.input)?;
    create_dir(&args.out)?;
    let records: Vec<Record> = graphs
        .par_iter()
        .enumerate()
        .map(|(i, parsed)| {
            let (mut record, model) = isolate(i, parsed, |named| run_ilp(i, named, &opts));
            if let Some(model) = model {
                let path = args.out.join(format!("g{}.{}", i, ext));
                if let Err(e) = write(&path, &model) {
                    record = Record::failed(i, &record.graph, pipeline::STATUS_ERROR, format!("{:#}", e));
                }
            }
            record
        })
        .collect();
    write(&args.out.join("report.tsv"), &report::to_tsv(&records))?;
    let rows = aggregate(&records, &parse_buckets(report::DEFAULT_BUCKETS).expect("valid default"));
    write(&args.out.join("summary.tsv"), &aggregate_tsv(&rows))?;
    eprintln!("{}", timing_line(&records));
    Ok(batch_exit(&records))
}

fn cmd_stats(args: StatsArgs) -> Result<ExitCode> {
    let buckets = parse_buckets(&args.buckets).map_err(anyhow::Error::msg)?;
    let mut records = Vec::new();
    for path in &args.reports {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        records.extend(report::from_tsv(&text).with_context(|| path.display().to_string())?);
    }
    let rows = aggregate(&records, &buckets);
    let table = match args.format {
        TableFormat::Tsv => aggregate_tsv(&rows),
        TableFormat::Markdown => aggregate_markdown(&rows),
    };
    print!("{}", table);
    Ok(ExitCode::SUCCESS)
}
