//! Plain-text edge lists.
//!
//! ```text
//! # d: 10
//! # vertices: 1 2 3 4 5 6 7 8 9 10
//! 1 -> 2
//! 2 -> 3
//! ```
//!
//! One `i -> j` (directed) or `i -- j` (undirected) per line, 1-based. The
//! optional headers fix the dimension and vertex set; without them the
//! vertices are `1..=max label`. Other `#` lines are comments.

use std::fmt::Write as _;

use super::{CausalityGraph, UndirectedGraph, VertexSet};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParsedGraph {
    Directed(CausalityGraph),
    Undirected(UndirectedGraph),
}

fn header(d: usize, vertices: &VertexSet) -> String {
    let labels: Vec<String> = vertices.iter().map(|v| (v + 1).to_string()).collect();
    format!("# d: {d}\n# vertices: {}\n", labels.join(" "))
}

impl CausalityGraph {
    pub fn to_edge_list(&self) -> String {
        let mut out = header(self.d(), self.vertices());
        for &(a, b) in self.edges() {
            writeln!(out, "{} -> {}", a + 1, b + 1).unwrap();
        }
        out
    }
}

impl UndirectedGraph {
    pub fn to_edge_list(&self) -> String {
        let mut out = header(self.d(), self.vertices());
        for &(a, b) in self.edges() {
            writeln!(out, "{} -- {}", a + 1, b + 1).unwrap();
        }
        out
    }
}

fn parse_label(token: &str, line_no: usize) -> Result<usize> {
    match token.trim().parse::<usize>() {
        Ok(v) if v >= 1 => Ok(v - 1),
        _ => Err(Error::InvalidParameter(format!(
            "line {line_no}: expected a 1-based vertex label, got {token:?}"
        ))),
    }
}

pub fn parse_edge_list(text: &str) -> Result<ParsedGraph> {
    let mut d: Option<usize> = None;
    let mut vertices: Option<VertexSet> = None;
    let mut directed: Vec<(usize, usize)> = Vec::new();
    let mut undirected: Vec<(usize, usize)> = Vec::new();

    for (n, raw) in text.lines().enumerate() {
        let line_no = n + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            let comment = comment.trim();
            if let Some(rest) = comment.strip_prefix("d:") {
                d = Some(rest.trim().parse().map_err(|_| {
                    Error::InvalidParameter(format!("line {line_no}: bad dimension header"))
                })?);
            } else if let Some(rest) = comment.strip_prefix("vertices:") {
                vertices = Some(
                    rest.split_whitespace()
                        .map(|t| parse_label(t, line_no))
                        .collect::<Result<VertexSet>>()?,
                );
            }
            continue;
        }
        if let Some((a, b)) = line.split_once("->") {
            directed.push((parse_label(a, line_no)?, parse_label(b, line_no)?));
        } else if let Some((a, b)) = line.split_once("--") {
            undirected.push((parse_label(a, line_no)?, parse_label(b, line_no)?));
        } else {
            return Err(Error::InvalidParameter(format!(
                "line {line_no}: expected `i -> j` or `i -- j`, got {line:?}"
            )));
        }
    }
    if !directed.is_empty() && !undirected.is_empty() {
        return Err(Error::InvalidParameter("edge list mixes `->` and `--` edges".into()));
    }

    let max_label = directed
        .iter()
        .chain(undirected.iter())
        .flat_map(|&(a, b)| [a, b])
        .chain(vertices.iter().flatten().copied())
        .max()
        .map_or(0, |m| m + 1);
    let d = d.unwrap_or(max_label);
    if d < max_label {
        return Err(Error::InvalidParameter(format!("vertex {max_label} exceeds declared d = {d}")));
    }
    let vertices = vertices.unwrap_or_else(|| (0..d).collect());

    if undirected.is_empty() {
        let mut g = CausalityGraph::on_vertices(d, vertices)?;
        for (a, b) in directed {
            g.add_edge(a, b)?;
        }
        Ok(ParsedGraph::Directed(g))
    } else {
        let mut g = UndirectedGraph::on_vertices(d, vertices)?;
        for (a, b) in undirected {
            g.add_edge(a, b)?;
        }
        Ok(ParsedGraph::Undirected(g))
    }
}
