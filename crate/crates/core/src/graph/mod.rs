//! Granger causality graphs and the graph algorithms behind global Markov
//! queries.
//!
//! Vertices are `0..d` internally and 1-based in the text format. Self-loops
//! are kept as edges (diagonal kernels) but never appear on paths.

mod io;
mod markov;

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};

pub use io::{parse_edge_list, ParsedGraph};
pub use markov::{
    ancestors, granger_noncausal, graph_from_estimate, graph_from_model, is_blocked, is_collider,
    markov_subprocess_graph, moral_graph, reduce, separated,
};

pub type VertexSet = BTreeSet<usize>;

/// Directed graph; edge `(i, j)` is `i → j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CausalityGraph {
    d: usize,
    vertices: VertexSet,
    edges: BTreeSet<(usize, usize)>,
}

impl CausalityGraph {
    /// Graph on all of `0..d` without edges.
    pub fn new(d: usize) -> Self {
        CausalityGraph { d, vertices: (0..d).collect(), edges: BTreeSet::new() }
    }

    pub fn on_vertices(d: usize, vertices: VertexSet) -> Result<Self> {
        check_vertices(d, &vertices)?;
        Ok(CausalityGraph { d, vertices, edges: BTreeSet::new() })
    }

    pub fn from_edges(d: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = CausalityGraph::new(d);
        for &(a, b) in edges {
            g.add_edge(a, b)?;
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, from: usize, to: usize) -> Result<()> {
        for v in [from, to] {
            if !self.vertices.contains(&v) {
                return Err(Error::InvalidParameter(format!("vertex {} not in graph", v + 1)));
            }
        }
        self.edges.insert((from, to));
        Ok(())
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn vertices(&self) -> &VertexSet {
        &self.vertices
    }

    pub fn edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.edges.contains(&(from, to))
    }

    /// Parents of `v`, excluding `v` itself.
    pub fn parents(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges.iter().filter(move |(a, b)| *b == v && *a != v).map(|(a, _)| *a)
    }

    /// Children of `v`, excluding `v` itself.
    pub fn children(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges.iter().filter(move |(a, b)| *a == v && *b != v).map(|(_, b)| *b)
    }

    /// Vertices with no edge other than a self-loop.
    pub fn isolated(&self) -> VertexSet {
        self.vertices
            .iter()
            .copied()
            .filter(|&v| !self.edges.iter().any(|&(a, b)| a != b && (a == v || b == v)))
            .collect()
    }

    /// Subgraph on `keep`, retaining every edge between retained vertices.
    pub fn induced(&self, keep: &VertexSet) -> CausalityGraph {
        let vertices: VertexSet = self.vertices.intersection(keep).copied().collect();
        let edges = self
            .edges
            .iter()
            .filter(|(a, b)| vertices.contains(a) && vertices.contains(b))
            .copied()
            .collect();
        CausalityGraph { d: self.d, vertices, edges }
    }

    /// Apply the vertex permutation `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> CausalityGraph {
        CausalityGraph {
            d: self.d,
            vertices: self.vertices.iter().map(|&v| perm[v]).collect(),
            edges: self.edges.iter().map(|&(a, b)| (perm[a], perm[b])).collect(),
        }
    }
}

/// Undirected graph without self-loops; edges stored as `(min, max)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UndirectedGraph {
    d: usize,
    vertices: VertexSet,
    edges: BTreeSet<(usize, usize)>,
}

impl UndirectedGraph {
    pub fn new(d: usize) -> Self {
        UndirectedGraph { d, vertices: (0..d).collect(), edges: BTreeSet::new() }
    }

    pub fn on_vertices(d: usize, vertices: VertexSet) -> Result<Self> {
        check_vertices(d, &vertices)?;
        Ok(UndirectedGraph { d, vertices, edges: BTreeSet::new() })
    }

    pub fn from_edges(d: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = UndirectedGraph::new(d);
        for &(a, b) in edges {
            g.add_edge(a, b)?;
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, a: usize, b: usize) -> Result<()> {
        if a == b {
            return Err(Error::InvalidParameter(format!("self-loop at {} in undirected graph", a + 1)));
        }
        for v in [a, b] {
            if !self.vertices.contains(&v) {
                return Err(Error::InvalidParameter(format!("vertex {} not in graph", v + 1)));
            }
        }
        self.edges.insert((a.min(b), a.max(b)));
        Ok(())
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn vertices(&self) -> &VertexSet {
        &self.vertices
    }

    pub fn edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges.iter().filter_map(move |&(a, b)| {
            if a == v {
                Some(b)
            } else if b == v {
                Some(a)
            } else {
                None
            }
        })
    }

    pub fn induced(&self, keep: &VertexSet) -> UndirectedGraph {
        let vertices: VertexSet = self.vertices.intersection(keep).copied().collect();
        let edges = self
            .edges
            .iter()
            .filter(|(a, b)| vertices.contains(a) && vertices.contains(b))
            .copied()
            .collect();
        UndirectedGraph { d: self.d, vertices, edges }
    }

    pub fn relabel(&self, perm: &[usize]) -> UndirectedGraph {
        UndirectedGraph {
            d: self.d,
            vertices: self.vertices.iter().map(|&v| perm[v]).collect(),
            edges: self
                .edges
                .iter()
                .map(|&(a, b)| (perm[a].min(perm[b]), perm[a].max(perm[b])))
                .collect(),
        }
    }
}

fn check_vertices(d: usize, vertices: &VertexSet) -> Result<()> {
    match vertices.iter().find(|&&v| v >= d) {
        Some(v) => Err(Error::InvalidParameter(format!("vertex {} exceeds d = {d}", v + 1))),
        None => Ok(()),
    }
}

/// Orientation of one step `a_{i−1} ~ a_i` of a path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `a_{i−1} → a_i`
    Forward,
    /// `a_{i−1} ← a_i`
    Backward,
}

/// Sequence of edges `a_0 ~ a_1 ~ … ~ a_n`, `n >= 1`. Vertices may repeat.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Path {
    vertices: Vec<usize>,
    steps: Vec<Direction>,
}

impl Path {
    pub fn new(graph: &CausalityGraph, vertices: Vec<usize>, steps: Vec<Direction>) -> Result<Self> {
        if steps.is_empty() || vertices.len() != steps.len() + 1 {
            return Err(Error::InvalidParameter(
                "a path needs n >= 1 steps and n + 1 vertices".into(),
            ));
        }
        for (n, dir) in steps.iter().enumerate() {
            let (a, b) = (vertices[n], vertices[n + 1]);
            if a == b {
                return Err(Error::InvalidParameter("self-loops cannot appear on a path".into()));
            }
            let ok = match dir {
                Direction::Forward => graph.has_edge(a, b),
                Direction::Backward => graph.has_edge(b, a),
            };
            if !ok {
                return Err(Error::InvalidParameter(format!(
                    "step {} between {} and {} is not an edge in the stated orientation",
                    n + 1,
                    a + 1,
                    b + 1
                )));
            }
        }
        Ok(Path { vertices, steps })
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn steps(&self) -> &[Direction] {
        &self.steps
    }

    /// Number of edges `n`.
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Ends with an arrowhead at the last vertex.
    pub fn is_pointing(&self) -> bool {
        self.steps.last() == Some(&Direction::Forward)
    }
}

/// `{1,2,3}` in 1-based labels.
pub struct DisplaySet<'a>(pub &'a VertexSet);

impl fmt::Display for DisplaySet<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|v| (v + 1).to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}
