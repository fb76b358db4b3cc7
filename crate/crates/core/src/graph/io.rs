//! Text and JSON graph formats.
//!
//! Text: a header line `n m` followed by `m` lines `u v`. Blank lines and
//! lines starting with `#` are ignored. JSON: `{"n": …, "edges": [[u, v], …]}`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::Graph;
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
struct GraphJson {
    n: usize,
    edges: Vec<[usize; 2]>,
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn parse_pair(line_no: usize, line: &str) -> Result<(usize, usize)> {
    let mut it = line.split_whitespace();
    let mut next = |what: &str| -> Result<usize> {
        let tok = it.next().ok_or_else(|| parse_err(line_no, format!("missing {what}")))?;
        tok.parse().map_err(|_| parse_err(line_no, format!("{what} {tok:?} is not a non-negative integer")))
    };
    let a = next("first value")?;
    let b = next("second value")?;
    if it.next().is_some() {
        return Err(parse_err(line_no, "expected exactly two values"));
    }
    Ok((a, b))
}

pub fn parse_text(src: &str) -> Result<Graph> {
    let mut lines = src.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hl, header) = lines.next().ok_or_else(|| parse_err(1, "empty graph file"))?;
    let (n, m) = parse_pair(hl, header)?;
    let mut edges = Vec::with_capacity(m);
    let mut seen = std::collections::HashSet::new();
    let mut last_line = hl;
    for (ln, line) in lines {
        let (a, b) = parse_pair(ln, line)?;
        if a == b {
            return Err(parse_err(ln, format!("self-loop {a} {b}")));
        }
        if a >= n || b >= n {
            return Err(parse_err(ln, format!("endpoint out of range 0..{n}")));
        }
        edges.push((a, b));
        if edges.len() > m {
            return Err(parse_err(ln, format!("more than the declared {m} edges")));
        }
        if !seen.insert((a.min(b), a.max(b))) {
            return Err(parse_err(ln, format!("repeated edge {a} {b}")));
        }
        last_line = ln;
    }
    if edges.len() != m {
        return Err(parse_err(last_line, format!("declared {m} edges, found {}", edges.len())));
    }
    Graph::new(n, edges).map_err(|e| parse_err(last_line, e.to_string()))
}

pub fn parse_json(src: &str) -> Result<Graph> {
    let g: GraphJson = serde_json::from_str(src).map_err(|e| parse_err(e.line(), e.to_string()))?;
    Graph::new(g.n, g.edges.into_iter().map(|[a, b]| (a, b))).map_err(|e| parse_err(0, e.to_string()))
}

/// Parses either format, choosing JSON when the first non-blank character is `{`.
pub fn parse_graph(src: &str) -> Result<Graph> {
    if src.trim_start().starts_with('{') {
        parse_json(src)
    } else {
        parse_text(src)
    }
}

pub fn read_graph(path: impl AsRef<Path>) -> Result<Graph> {
    let path = path.as_ref();
    let src = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_graph(&src)
}

pub fn to_text(g: &Graph) -> String {
    let mut s = format!("{} {}\n", g.node_count(), g.edge_count());
    for &(a, b) in g.edges() {
        s.push_str(&format!("{a} {b}\n"));
    }
    s
}

pub fn to_json(g: &Graph) -> String {
    let j = GraphJson { n: g.node_count(), edges: g.edges().iter().map(|&(a, b)| [a, b]).collect() };
    serde_json::to_string(&j).expect("graph serializes")
}

pub fn write_graph(g: &Graph, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let body = if path.extension().is_some_and(|e| e == "json") { to_json(g) } else { to_text(g) };
    std::fs::write(path, body).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete, crown};

    #[test]
    fn parses_triangle() {
        assert_eq!(parse_graph("3 3\n0 1\n1 2\n0 2").unwrap(), complete(3).unwrap());
        assert_eq!(parse_graph("# k3\n3 3\n\n0 1\n1 2\n0 2\n").unwrap(), complete(3).unwrap());
    }

    #[test]
    fn round_trips() {
        let g = crown(5).unwrap();
        assert_eq!(parse_graph(&to_text(&g)).unwrap(), g);
        assert_eq!(parse_graph(&to_json(&g)).unwrap(), g);
    }

    #[test]
    fn reports_line_numbers() {
        assert_eq!(parse_graph("3 2\n0 1\n0 0\n"), Err(Error::Parse { line: 3, msg: "self-loop 0 0".into() }));
        assert!(matches!(parse_graph("3 2\n0 1\n1 0\n"), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(parse_graph("3 2\n0 1\n"), Err(Error::Parse { .. })));
        assert!(matches!(parse_graph("3 1\n0 x\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_graph("3 1\n0 7\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_graph(""), Err(Error::Parse { .. })));
    }
}
