//! Edge-list and DIMACS graph readers. Vertex ids in files are 1-based.

use std::fs;
use std::path::Path;
use std::str::FromStr;

use drsub::Graph;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFormat {
    /// `u v` per line, `#` comments; `n` is the largest id seen.
    EdgeList,
    /// `p edge n m` header, then `e u v` lines; `c` lines are comments.
    Dimacs,
}

impl FromStr for GraphFormat {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "edgelist" => Ok(Self::EdgeList),
            "dimacs" => Ok(Self::Dimacs),
            other => Err(CliError::Config(format!("unknown graph format '{other}'"))),
        }
    }
}

pub fn parse_graph(path: &Path, format: GraphFormat) -> Result<Graph> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_graph_str(&text, format)
}

fn parse_id(token: &str, line: usize) -> Result<usize> {
    match token.parse::<usize>() {
        Ok(0) => Err(CliError::Parse { line, message: "vertex ids start at 1".into() }),
        Ok(v) => Ok(v),
        Err(_) => Err(CliError::Parse { line, message: format!("'{token}' is not a vertex id") }),
    }
}

fn check_edge(u: usize, v: usize, line: usize) -> Result<()> {
    if u == v {
        return Err(CliError::Parse { line, message: format!("self-loop at vertex {u}") });
    }
    Ok(())
}

pub fn parse_graph_str(text: &str, format: GraphFormat) -> Result<Graph> {
    match format {
        GraphFormat::EdgeList => parse_edge_list(text),
        GraphFormat::Dimacs => parse_dimacs(text),
    }
}

fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut edges = Vec::new();
    let mut n = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = content.split_whitespace().collect();
        if tokens.len() != 2 {
            return Err(CliError::Parse { line, message: format!("expected 'u v', got '{content}'") });
        }
        let u = parse_id(tokens[0], line)?;
        let v = parse_id(tokens[1], line)?;
        check_edge(u, v, line)?;
        n = n.max(u).max(v);
        edges.push((u - 1, v - 1));
    }
    if n == 0 {
        return Err(CliError::Parse { line: 0, message: "edge list has no edges".into() });
    }
    Ok(Graph::new(n, edges)?)
}

fn parse_dimacs(text: &str) -> Result<Graph> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let tokens: Vec<&str> = raw.split_whitespace().collect();
        match tokens.first().copied() {
            None | Some("c") => {}
            Some("p") => {
                if header.is_some() {
                    return Err(CliError::Parse { line, message: "duplicate 'p' header".into() });
                }
                if tokens.len() != 4 || !matches!(tokens[1], "edge" | "col") {
                    return Err(CliError::Parse { line, message: format!("expected 'p edge n m', got '{}'", raw.trim()) });
                }
                let n = tokens[2].parse().map_err(|_| CliError::Parse { line, message: "bad vertex count".into() })?;
                let m = tokens[3].parse().map_err(|_| CliError::Parse { line, message: "bad edge count".into() })?;
                header = Some((n, m, line));
            }
            Some("e") => {
                let Some((n, _, _)) = header else {
                    return Err(CliError::Parse { line, message: "edge before 'p' header".into() });
                };
                if tokens.len() != 3 {
                    return Err(CliError::Parse { line, message: format!("expected 'e u v', got '{}'", raw.trim()) });
                }
                let u = parse_id(tokens[1], line)?;
                let v = parse_id(tokens[2], line)?;
                check_edge(u, v, line)?;
                if u > n || v > n {
                    return Err(CliError::Parse { line, message: format!("vertex id above n = {n}") });
                }
                edges.push((u - 1, v - 1));
            }
            Some(other) => {
                return Err(CliError::Parse { line, message: format!("unknown line type '{other}'") });
            }
        }
    }
    let Some((n, m, header_line)) = header else {
        return Err(CliError::Parse { line: 0, message: "missing 'p edge n m' header".into() });
    };
    if edges.len() != m {
        return Err(CliError::Parse {
            line: header_line,
            message: format!("header declares {m} edges but {} were listed", edges.len()),
        });
    }
    if n == 0 {
        return Err(CliError::Parse { line: header_line, message: "graph has no vertices".into() });
    }
    Ok(Graph::new(n, edges)?)
}

/// Edge list of the 10-vertex, 12-edge example graph whose stability number is 4.
pub const EXAMPLE_GRAPH: &str = "\
1 2
1 3
2 3
3 4
4 5
4 6
5 7
6 7
7 8
8 9
8 10
9 10
";
