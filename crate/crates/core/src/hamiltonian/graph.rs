use std::collections::HashSet;
use std::path::Path;

use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub weight: f64,
}

/// Undirected weighted graph with unique edges.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct WeightedGraph {
    n_vertices: usize,
    edges: Vec<Edge>,
}

impl WeightedGraph {
    pub fn new(n_vertices: usize, edges: Vec<Edge>) -> Result<Self> {
        let mut seen = HashSet::new();
        for e in &edges {
            if e.i == e.j {
                return Err(Error::InvalidGraph(format!("self loop on vertex {}", e.i)));
            }
            if e.i >= n_vertices || e.j >= n_vertices {
                return Err(Error::InvalidGraph(format!(
                    "edge ({}, {}) outside {} vertices",
                    e.i, e.j, n_vertices
                )));
            }
            if !e.weight.is_finite() {
                return Err(Error::InvalidGraph(format!(
                    "edge ({}, {}) has weight {}",
                    e.i, e.j, e.weight
                )));
            }
            if !seen.insert((e.i.min(e.j), e.i.max(e.j))) {
                return Err(Error::InvalidGraph(format!("duplicate edge ({}, {})", e.i, e.j)));
            }
        }
        Ok(Self { n_vertices, edges })
    }

    pub fn unweighted(n_vertices: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let edges = pairs.iter().map(|&(i, j)| Edge { i, j, weight: 1.0 }).collect();
        Self::new(n_vertices, edges)
    }

    /// The 4-vertex benchmark: a square with one diagonal.
    pub fn benchmark() -> Self {
        Self::unweighted(4, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]).expect("valid graph")
    }

    pub fn complete(n_vertices: usize) -> Self {
        let pairs: Vec<(usize, usize)> = (0..n_vertices)
            .flat_map(|i| (i + 1..n_vertices).map(move |j| (i, j)))
            .collect();
        Self::unweighted(n_vertices, &pairs).expect("valid graph")
    }

    /// Parses `i j weight` lines; `#` starts a comment. The vertex count is
    /// `n_vertices` if given, else one past the largest index.
    pub fn parse(text: &str, n_vertices: Option<usize>) -> Result<Self> {
        let mut edges = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let toks: Vec<&str> = body.split_whitespace().collect();
            if toks.len() != 3 {
                return Err(Error::Parse {
                    line,
                    message: format!("expected 'i j weight', got '{body}'"),
                });
            }
            let bad = |what: &str| Error::Parse {
                line,
                message: format!("bad {what}"),
            };
            edges.push(Edge {
                i: toks[0].parse().map_err(|_| bad("vertex"))?,
                j: toks[1].parse().map_err(|_| bad("vertex"))?,
                weight: toks[2].parse().map_err(|_| bad("weight"))?,
            });
        }
        let n = n_vertices.unwrap_or_else(|| edges.iter().map(|e| e.i.max(e.j) + 1).max().unwrap_or(0));
        Self::new(n, edges)
    }

    pub fn from_file(path: &Path, n_vertices: Option<usize>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?, n_vertices)
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.weight).sum()
    }

    /// Weight of edges cut by the bipartition encoded in `bits`.
    pub fn cut_value(&self, bits: usize) -> f64 {
        self.edges
            .iter()
            .filter(|e| (bits >> e.i ^ bits >> e.j) & 1 == 1)
            .map(|e| e.weight)
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_with_comments() {
        let g = WeightedGraph::parse("# square\n0 1 1.0\n1 2 0.5 # inline\n\n2 0 2\n", None).unwrap();
        assert_eq!(g.n_vertices(), 3);
        assert_eq!(g.edges().len(), 3);
        assert_eq!(g.edges()[1].weight, 0.5);
    }

    #[test]
    fn parse_errors_carry_line() {
        let err = WeightedGraph::parse("0 1 1\n0 x 1\n", None).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        let err = WeightedGraph::parse("0 1\n", None).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn rejects_invalid_edges() {
        assert!(WeightedGraph::unweighted(2, &[(0, 0)]).is_err());
        assert!(WeightedGraph::unweighted(2, &[(0, 2)]).is_err());
        assert!(WeightedGraph::unweighted(3, &[(0, 1), (1, 0)]).is_err());
    }

    #[test]
    fn benchmark_max_cut_is_four() {
        let g = WeightedGraph::benchmark();
        let best = (0..16).map(|b| g.cut_value(b)).fold(0.0, f64::max);
        assert_eq!(best, 4.0);
        assert_eq!(g.cut_value(0b0101), 4.0);
        assert_eq!(g.cut_value(0b1010), 4.0);
    }
}
