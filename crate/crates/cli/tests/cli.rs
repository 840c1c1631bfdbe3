use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use safeseq::format::read_graphs;
use safeseq::graph::into_st_dag;
use safeseq::ilp::percentile_subset;
use safeseq::safety::{arc_sequences_tsv, maximal_safe_arc_sequences_subset};
use tempfile::TempDir;

const DIAMOND: &str = "# diamond\n4\n0 1 3\n0 2 7\n1 3 3\n2 3 7\n";
const PATH: &str = "# path\n3\n0 1 3\n1 2 5\n";

fn run(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_safeseq"));
    cmd.args(args);
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn input(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn out_dir(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_string()
}

fn report_rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split('\t').map(str::to_string).collect())
        .collect()
}

/// Column index in a report row.
fn col(name: &str) -> usize {
    [
        "index", "graph", "status", "n", "m", "width", "k", "prep_seconds", "sequences",
        "total_length", "fixed", "binaries", "fixed_pct", "objective_unfixed", "objective_fixed", "note",
    ]
    .iter()
    .position(|c| *c == name)
    .unwrap()
}

#[test]
fn diamond_has_two_node_sequences() {
    let dir = TempDir::new().unwrap();
    let o = run(&["safety", &input(&dir, "d.graph", DIAMOND), "--mode", "nodes"], &[]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "diamond\t0\t0 1 3\ndiamond\t1\t0 2 3\n");
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("prep "));
}

#[test]
fn path_has_one_arc_sequence() {
    let dir = TempDir::new().unwrap();
    let o = run(&["safety", &input(&dir, "p.graph", PATH), "--mode", "arcs"], &[]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "path\t0\t0:1:0 1:2:1\n");
}

#[test]
fn json_output_and_report_file() {
    let dir = TempDir::new().unwrap();
    let out = out_dir(&dir, "o");
    let o = run(
        &["safety", &input(&dir, "d.graph", DIAMOND), "--format", "json", "--out", &out],
        &[],
    );
    assert!(o.status.success());
    let json = fs::read_to_string(Path::new(&out).join("sequences.jsonl")).unwrap();
    let v: serde_json::Value = serde_json::from_str(json.trim()).unwrap();
    assert_eq!(v["sequences"], serde_json::json!([[0, 1, 3], [0, 2, 3]]));
    let rows = report_rows(&Path::new(&out).join("report.tsv"));
    assert_eq!(rows[0][col("sequences")], "2");
    assert_eq!(rows[0][col("total_length")], "6");
    assert_eq!(rows[0][col("width")], "2");
}

#[test]
fn percentile_matches_library() {
    let text = "# a\n6\n0 1 5\n0 2 1\n1 3 4\n2 3 1\n3 4 2\n3 5 9\n4 5 2\n\
                # b\n5\n0 1 2\n0 1 8\n1 2 3\n1 3 7\n2 4 3\n3 4 7\n0 4 1\n";
    let dir = TempDir::new().unwrap();
    let o = run(
        &["safety", &input(&dir, "g.graph", text), "--mode", "arcs", "--subset-percentile", "25"],
        &[],
    );
    assert!(o.status.success());
    let mut expected = String::new();
    for parsed in read_graphs(text) {
        let named = parsed.unwrap();
        let g = into_st_dag(named.graph).unwrap();
        let c = percentile_subset(&g, 25.0).unwrap();
        let seqs: Vec<Vec<usize>> = maximal_safe_arc_sequences_subset(&g, &c)
            .unwrap()
            .into_iter()
            .map(|s| s.arcs)
            .collect();
        expected += &arc_sequences_tsv(&g, &named.name, &seqs);
    }
    assert_eq!(stdout(&o), expected);
}

#[test]
fn subset_file_restricts_nodes() {
    let dir = TempDir::new().unwrap();
    let subset = input(&dir, "c.tsv", "diamond\t1\n");
    let o = run(
        &["safety", &input(&dir, "d.graph", DIAMOND), "--subset-file", &subset],
        &[],
    );
    assert!(o.status.success());
    assert_eq!(stdout(&o), "diamond\t0\t0 1 3\n");
    let bad = input(&dir, "bad.tsv", "diamond\t9\n");
    let o = run(&["safety", &input(&dir, "d.graph", DIAMOND), "--subset-file", &bad], &[]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn multi_source_graphs_are_normalized() {
    let dir = TempDir::new().unwrap();
    let o = run(&["safety", &input(&dir, "m.graph", "# two\n4\n0 2 1\n1 2 1\n2 3 1\n")], &[]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "two\t0\t0 2 3\ntwo\t1\t1 2 3\n");
}

#[test]
fn ilp_full_safety_on_diamond() {
    let dir = TempDir::new().unwrap();
    let out = out_dir(&dir, "o");
    let o = run(
        &["ilp", &input(&dir, "d.graph", DIAMOND), "--problem", "mpe", "--safety", "full", "--k", "auto", "--out", &out],
        &[],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = report_rows(&Path::new(&out).join("report.tsv"));
    assert_eq!(rows[0][col("k")], "2");
    assert_eq!(rows[0][col("fixed_pct")], "50.0000");
    let lp = fs::read_to_string(Path::new(&out).join("g0.lp")).unwrap();
    assert!(lp.starts_with("\\ Problem: mpe_k2\n"));
    assert!(Path::new(&out).join("summary.tsv").exists());
}

#[test]
fn ilp_without_safety_fixes_nothing() {
    let dir = TempDir::new().unwrap();
    let out = out_dir(&dir, "o");
    let o = run(
        &["ilp", &input(&dir, "d.graph", DIAMOND), "--safety", "none", "--export", "mps", "--out", &out],
        &[],
    );
    assert!(o.status.success());
    let rows = report_rows(&Path::new(&out).join("report.tsv"));
    assert_eq!(rows[0][col("fixed_pct")], "0.0000");
    let mps = fs::read_to_string(Path::new(&out).join("g0.mps")).unwrap();
    assert!(safeseq::ilp::parse_mps(&mps).is_ok());
}

#[test]
fn solve_tiny_reports_forced_objective() {
    let dir = TempDir::new().unwrap();
    let out = out_dir(&dir, "o");
    let o = run(
        &["ilp", &input(&dir, "p.graph", PATH), "--problem", "mpe", "--solve-tiny", "--out", &out],
        &[],
    );
    assert!(o.status.success());
    let rows = report_rows(&Path::new(&out).join("report.tsv"));
    assert_eq!(rows[0][col("objective_unfixed")], "1");
    assert_eq!(rows[0][col("objective_fixed")], "1");
    let out2 = out_dir(&dir, "o2");
    run(
        &["ilp", &input(&dir, "p.graph", PATH), "--problem", "lsq", "--solve-tiny", "--out", &out2],
        &[],
    );
    let rows = report_rows(&Path::new(&out2).join("report.tsv"));
    assert_eq!(rows[0][col("objective_unfixed")], "2");
}

#[test]
fn path_limit_skips_solve_tiny() {
    let dir = TempDir::new().unwrap();
    let out = out_dir(&dir, "o");
    let o = run(
        &["ilp", &input(&dir, "d.graph", DIAMOND), "--solve-tiny", "--out", &out],
        &[("SAFESEQ_PATH_LIMIT", "1")],
    );
    assert!(o.status.success());
    let rows = report_rows(&Path::new(&out).join("report.tsv"));
    assert_eq!(rows[0][col("objective_unfixed")], "-");
    assert!(rows[0][col("note")].contains("skipped"));
    let o = run(
        &["ilp", &input(&dir, "d.graph", DIAMOND), "--solve-tiny", "--out", &out],
        &[("SAFESEQ_PATH_LIMIT", "many")],
    );
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn too_many_sequences_is_a_per_graph_error() {
    let dir = TempDir::new().unwrap();
    let out = out_dir(&dir, "o");
    let text = format!("{}{}", DIAMOND, PATH);
    let o = run(&["ilp", &input(&dir, "g.graph", &text), "--k", "1", "--out", &out], &[]);
    assert_eq!(o.status.code(), Some(1));
    let rows = report_rows(&Path::new(&out).join("report.tsv"));
    assert_eq!(rows[0][col("status")], "error");
    assert!(rows[0][col("note")].contains("do not fit"));
    assert_eq!(rows[1][col("status")], "ok");
    assert!(Path::new(&out).join("g1.lp").exists());
}

#[test]
fn malformed_graph_does_not_abort_batch() {
    let dir = TempDir::new().unwrap();
    let text = format!("{}# bad\n3\n0 1 x\n# cycle\n3\n0 1 1\n1 2 1\n2 1 1\n{}", DIAMOND, PATH);
    let out = out_dir(&dir, "o");
    let o = run(&["safety", &input(&dir, "g.graph", &text), "--out", &out], &[]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr).to_string();
    assert!(err.contains("line 9: invalid weight"), "{}", err);
    let seqs = fs::read_to_string(Path::new(&out).join("sequences.tsv")).unwrap();
    assert!(seqs.contains("diamond\t") && seqs.contains("path\t"));
    let statuses: Vec<String> = report_rows(&Path::new(&out).join("report.tsv"))
        .into_iter()
        .map(|r| r[col("status")].clone())
        .collect();
    assert_eq!(statuses, ["ok", "input-error", "input-error", "ok"]);
}

#[test]
fn outputs_are_deterministic_across_job_counts() {
    let sample = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/tests/data/sample50.graph");
    let dir = TempDir::new().unwrap();
    let mut contents = Vec::new();
    for jobs in ["1", "4"] {
        for mode in ["nodes", "arcs"] {
            let out = out_dir(&dir, &format!("s{}{}", jobs, mode));
            let o = run(&["safety", sample, "--mode", mode, "--jobs", jobs, "--out", &out], &[]);
            assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
            contents.push(fs::read(Path::new(&out).join("sequences.tsv")).unwrap());
        }
        let out = out_dir(&dir, &format!("i{}", jobs));
        let o = run(&["ilp", sample, "--jobs", jobs, "--out", &out], &[]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let mut models = Vec::new();
        for i in 0..50 {
            models.extend(fs::read(Path::new(&out).join(format!("g{}.lp", i))).unwrap());
        }
        contents.push(models);
    }
    assert_eq!(contents[0], contents[3]);
    assert_eq!(contents[1], contents[4]);
    assert_eq!(contents[2], contents[5]);
}

#[test]
fn stats_single_diamond() {
    let dir = TempDir::new().unwrap();
    let out = out_dir(&dir, "o");
    run(&["ilp", &input(&dir, "d.graph", DIAMOND), "--out", &out], &[]);
    let report = Path::new(&out).join("report.tsv");
    let o = run(&["stats", report.to_str().unwrap()], &[]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[1].starts_with("1-3\t1\t4.0\t4\t"));
    assert!(lines[1].ends_with("\t50.00"));
}

#[test]
fn stats_empty_input() {
    let o = run(&["stats"], &[]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "width\t#g\tavg m\tmax m\tprep\tvars%\n");
}

#[test]
fn stats_bucket_counts() {
    let widths = [1usize, 2, 3, 3, 4, 6, 7, 9, 10, 15];
    let mut text = String::new();
    for (i, &w) in widths.iter().enumerate() {
        text += &format!("# w{}\n2\n", i);
        for _ in 0..w {
            text += "0 1 1\n";
        }
    }
    let dir = TempDir::new().unwrap();
    let out = out_dir(&dir, "o");
    let o = run(&["ilp", &input(&dir, "w.graph", &text), "--safety", "none", "--out", &out], &[]);
    assert!(o.status.success());
    let report = Path::new(&out).join("report.tsv");
    let o = run(&["stats", report.to_str().unwrap()], &[]);
    let counts: Vec<(String, String)> = stdout(&o)
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split('\t').collect();
            (f[0].to_string(), f[1].to_string())
        })
        .collect();
    let expect = [("1-3", "4"), ("4-6", "2"), ("7-9", "2"), ("10+", "2")];
    assert_eq!(
        counts,
        expect.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect::<Vec<_>>()
    );
    let o = run(&["stats", report.to_str().unwrap(), "--buckets", "1-5,6+", "--format", "markdown"], &[]);
    let text = stdout(&o);
    assert!(text.contains("| 1-5 | 5 |") && text.contains("| 6+ | 5 |"), "{}", text);
    let o = run(&["stats", report.to_str().unwrap(), "--buckets", "9-1"], &[]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&["safety"], &[]).status.code(), Some(1));
    assert_eq!(run(&["ilp", "x.graph", "--out", "o", "--problem", "zzz"], &[]).status.code(), Some(1));
    assert_eq!(run(&["safety", "/nonexistent/file.graph"], &[]).status.code(), Some(1));
    assert!(run(&["--help"], &[]).status.success());
}
