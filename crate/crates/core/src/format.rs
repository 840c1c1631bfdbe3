//! Reader and writer for the multi-graph `.graph` text format used by
//! splice-graph benchmark collections:
//!
//! ```text
//! # <graph name>
//! <node count>
//! <tail> <head> <weight>
//! ...
//! ```
//!
//! Blocks repeat. Node ids are 0-based, weights are nonnegative numbers.
//! Each block is parsed on its own so one malformed graph does not hide the
//! others.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::DiGraph;

#[derive(Debug, Clone, PartialEq)]
pub struct NamedGraph {
    pub name: String,
    pub graph: DiGraph,
}

/// Parses every block of `text`. The result has one entry per `#` header
/// (plus one error entry if data precedes the first header).
pub fn read_graphs(text: &str) -> Vec<Result<NamedGraph>> {
    type Block<'a> = (usize, &'a str, Vec<(usize, &'a str)>);
    let mut blocks: Vec<Block> = Vec::new();
    let mut preamble: Option<usize> = None;
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        if let Some(rest) = line.strip_prefix('#') {
            blocks.push((lineno, rest.strip_prefix(' ').unwrap_or(rest), Vec::new()));
        } else if let Some(block) = blocks.last_mut() {
            block.2.push((lineno, line));
        } else if !line.trim().is_empty() && preamble.is_none() {
            preamble = Some(lineno);
        }
    }
    let mut out = Vec::with_capacity(blocks.len() + 1);
    if let Some(line) = preamble {
        out.push(Err(Error::Parse {
            line,
            message: "data before the first '#' header".to_string(),
        }));
    }
    for (header, name, lines) in blocks {
        out.push(parse_block(header, name, &lines));
    }
    out
}

fn parse_block(header: usize, name: &str, lines: &[(usize, &str)]) -> Result<NamedGraph> {
    let mut body = lines.iter().filter(|(_, l)| !l.trim().is_empty());
    let (count_line, count_text) = body.next().ok_or_else(|| Error::Parse {
        line: header,
        message: "missing node count".to_string(),
    })?;
    let node_count: usize = count_text.trim().parse().map_err(|_| Error::Parse {
        line: *count_line,
        message: format!("invalid node count {:?}", count_text.trim()),
    })?;
    let mut graph = DiGraph::new(node_count);
    for &(lineno, line) in body {
        let fields: Vec<&str> = line.split_whitespace().collect();
        let bad = |message: String| Error::Parse {
            line: lineno,
            message,
        };
        if fields.len() != 3 {
            return Err(bad(format!("expected `tail head weight`, got {:?}", line)));
        }
        let tail: usize = fields[0]
            .parse()
            .map_err(|_| bad(format!("invalid tail {:?}", fields[0])))?;
        let head: usize = fields[1]
            .parse()
            .map_err(|_| bad(format!("invalid head {:?}", fields[1])))?;
        let weight: f64 = fields[2]
            .parse()
            .map_err(|_| bad(format!("invalid weight {:?}", fields[2])))?;
        if !weight.is_finite() || weight < 0.0 {
            return Err(bad(format!("weight must be a nonnegative number, got {}", fields[2])));
        }
        graph
            .add_arc(tail, head, weight)
            .map_err(|e| bad(e.to_string()))?;
    }
    Ok(NamedGraph {
        name: name.to_string(),
        graph,
    })
}

/// Writes graphs in the same format [`read_graphs`] accepts. Integral
/// weights are written without a fractional part.
pub fn write_graphs<'a, I>(graphs: I) -> String
where
    I: IntoIterator<Item = &'a NamedGraph>,
{
    let mut out = String::new();
    for g in graphs {
        let _ = writeln!(out, "# {}", g.name);
        let _ = writeln!(out, "{}", g.graph.node_count());
        for a in g.graph.arcs() {
            let _ = writeln!(out, "{} {} {}", a.tail, a.head, format_number(a.weight));
        }
    }
    out
}

/// Shortest text that parses back to `x`; integers print without a decimal
/// point.
pub fn format_number(x: f64) -> String {
    if x == x.trunc() && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format!("{}", x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "# graph number = 0 name = g0\n4\n0 1 3\n0 2 7\n1 3 3\n2 3 7.5\n# second\n2\n0 1 1\n";

    #[test]
    fn parses_blocks() {
        let gs: Vec<NamedGraph> = read_graphs(SAMPLE).into_iter().map(|r| r.unwrap()).collect();
        assert_eq!(gs.len(), 2);
        assert_eq!(gs[0].name, "graph number = 0 name = g0");
        assert_eq!(gs[0].graph.arc_count(), 4);
        assert_eq!(gs[0].graph.arc(3).weight, 7.5);
        assert_eq!(write_graphs(&gs), SAMPLE);
    }

    #[test]
    fn malformed_block_is_isolated() {
        let text = "# a\n3\n0 1 1\n1 x 2\n# b\n2\n0 1 4\n";
        let rs = read_graphs(text);
        assert_eq!(rs.len(), 2);
        assert_eq!(
            rs[0].as_ref().unwrap_err(),
            &Error::Parse {
                line: 4,
                message: "invalid head \"x\"".to_string()
            }
        );
        assert_eq!(rs[1].as_ref().unwrap().graph.arc_count(), 1);
    }

    #[test]
    fn rejects_out_of_range_and_negative() {
        let rs = read_graphs("# a\n2\n0 5 1\n");
        assert!(matches!(rs[0], Err(Error::Parse { line: 3, .. })));
        let rs = read_graphs("# a\n2\n0 1 -1\n");
        assert!(matches!(rs[0], Err(Error::Parse { line: 3, .. })));
        let rs = read_graphs("0 1 1\n# a\n2\n");
        assert!(matches!(rs[0], Err(Error::Parse { line: 1, .. })));
        assert!(rs[1].is_ok());
    }

    #[test]
    fn number_formatting() {
        assert_eq!(format_number(3.0), "3");
        assert_eq!(format_number(0.1), "0.1");
        assert_eq!(format_number(2.5e20), "250000000000000000000");
    }
}
