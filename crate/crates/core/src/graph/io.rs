//! Tab-separated edge lists: `src<TAB>dst[<TAB>weight]`, 0-based ids, each
//! undirected edge once, `#` comments, weight 1.0 when omitted.

use std::io::{BufRead, Write};

use super::Graph;
use crate::error::{Error, Result};

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

/// Parse edge-list text into `(src, dst, weight)` triples.
pub fn parse_edge_list<R: BufRead>(reader: R) -> Result<Vec<(usize, usize, f64)>> {
    let mut edges = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split('\t').map(str::trim).collect();
        if !(2..=3).contains(&fields.len()) {
            return Err(parse_err(lineno, format!("expected 2 or 3 tab-separated fields, got {}", fields.len())));
        }
        let id = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| parse_err(lineno, format!("invalid node id {s:?}")))
        };
        let (u, v) = (id(fields[0])?, id(fields[1])?);
        let w = match fields.get(2) {
            Some(s) => s
                .parse::<f64>()
                .ok()
                .filter(|w| w.is_finite() && *w >= 0.0)
                .ok_or_else(|| parse_err(lineno, format!("invalid weight {s:?}")))?,
            None => 1.0,
        };
        if u == v {
            return Err(parse_err(lineno, format!("self-loop at node {u}")));
        }
        edges.push((u, v, w));
    }
    Ok(edges)
}

/// Read an edge list into a graph on `n` nodes.
pub fn read_edge_list<R: BufRead>(reader: R, n: usize) -> Result<Graph> {
    Graph::from_edges(n, parse_edge_list(reader)?)
}

/// Write `graph` as an edge list; unit weights are written without a weight field.
pub fn write_edge_list<W: Write>(graph: &Graph, mut out: W) -> Result<()> {
    writeln!(out, "# n={} edges={}", graph.n(), graph.edge_count())?;
    for (u, v, w) in graph.edges() {
        if w == 1.0 {
            writeln!(out, "{u}\t{v}")?;
        } else {
            writeln!(out, "{u}\t{v}\t{w}")?;
        }
    }
    Ok(())
}
