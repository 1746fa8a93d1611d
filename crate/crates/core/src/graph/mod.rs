//! Simple undirected graphs, the named fixtures used throughout the crate,
//! and exact combinatorial invariants.

mod coloring;
mod independence;
mod named;
mod perkel;
mod spectrum;

use std::fmt;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

pub use coloring::{chromatic_number, chromatic_number_with_budget, ChromaticOutcome, Coloring};
pub use independence::{
    clique_number, independence_number, independence_number_with_budget, VertexSet,
    DEFAULT_NODE_BUDGET, MAX_SEARCH_VERTICES,
};
pub use named::{named_graph, NamedGraph};
pub use perkel::{validate_perkel, PerkelCheck, ValidationReport};
pub use spectrum::{adjacency_spectrum, is_srg, SpectrumSummary, SrgParams, CLUSTER_TOLERANCE};

/// Undirected simple graph on vertices `0..vertex_count`.
#[derive(Clone)]
pub struct Graph {
    n: usize,
    adj: Vec<Vec<usize>>,
    matrix: Vec<bool>,
    name: Option<String>,
}

impl Graph {
    /// Builds a graph, rejecting self-loops, duplicate edges and out-of-range endpoints.
    pub fn new(vertex_count: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut g = Self::empty(vertex_count)?;
        for (u, v) in edges {
            g.insert_edge(u, v).map_err(Error::Invalid)?;
        }
        Ok(g)
    }

    /// Graph with no edges.
    pub fn empty(vertex_count: usize) -> Result<Self> {
        if vertex_count == 0 {
            return Err(Error::Invalid("a graph needs at least one vertex".into()));
        }
        Ok(Self {
            n: vertex_count,
            adj: vec![Vec::new(); vertex_count],
            matrix: vec![false; vertex_count * vertex_count],
            name: None,
        })
    }

    fn insert_edge(&mut self, u: usize, v: usize) -> std::result::Result<(), String> {
        if u == v {
            return Err(format!("self-loop on vertex {u}"));
        }
        if u >= self.n || v >= self.n {
            return Err(format!(
                "edge ({u}, {v}) has an endpoint outside 0..{}",
                self.n
            ));
        }
        if self.matrix[u * self.n + v] {
            return Err(format!("duplicate edge ({u}, {v})"));
        }
        self.matrix[u * self.n + v] = true;
        self.matrix[v * self.n + u] = true;
        let pos = self.adj[u].binary_search(&v).unwrap_err();
        self.adj[u].insert(pos, v);
        let pos = self.adj[v].binary_search(&u).unwrap_err();
        self.adj[v].insert(pos, u);
        Ok(())
    }

    /// Parses the edge-list text format: a header `n=<int>` (a bare integer is
    /// also accepted), then one `<u> <v>` pair per line. `#` starts a comment and
    /// `;` may stand in for a newline.
    pub fn from_edge_list(text: &str) -> Result<Self> {
        let mut graph: Option<Graph> = None;
        let records = text
            .lines()
            .enumerate()
            .flat_map(|(i, line)| {
                let line = line.split('#').next().unwrap_or("");
                line.split(';').map(move |part| (i + 1, part.trim()))
            })
            .filter(|(_, part)| !part.is_empty());

        for (line, record) in records {
            match graph.as_mut() {
                None => {
                    let value = record
                        .strip_prefix("n=")
                        .or_else(|| record.strip_prefix("n ="))
                        .unwrap_or(record)
                        .trim();
                    let n: usize = value.parse().map_err(|_| Error::Parse {
                        line,
                        message: format!("expected vertex count header `n=<int>`, found `{record}`"),
                    })?;
                    graph = Some(Graph::empty(n).map_err(|e| Error::Parse {
                        line,
                        message: e.to_string(),
                    })?);
                }
                Some(g) => {
                    let mut fields = record.split_whitespace();
                    let mut endpoint = || -> Result<usize> {
                        fields
                            .next()
                            .and_then(|s| s.parse().ok())
                            .ok_or_else(|| Error::Parse {
                                line,
                                message: format!("expected `<u> <v>`, found `{record}`"),
                            })
                    };
                    let u = endpoint()?;
                    let v = endpoint()?;
                    if fields.next().is_some() {
                        return Err(Error::Parse {
                            line,
                            message: format!("trailing data in `{record}`"),
                        });
                    }
                    g.insert_edge(u, v)
                        .map_err(|message| Error::Parse { line, message })?;
                }
            }
        }
        graph.ok_or(Error::Parse {
            line: 0,
            message: "missing vertex count header".into(),
        })
    }

    /// Serializes to the edge-list format accepted by [`Graph::from_edge_list`].
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        if let Some(name) = &self.name {
            out.push_str(&format!("# {name}\n"));
        }
        out.push_str(&format!("n={}\n", self.n));
        for (u, v) in self.edges() {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, nbrs)| nbrs.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && self.matrix[u * self.n + v]
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// Common degree if the graph is regular.
    pub fn regular_degree(&self) -> Option<usize> {
        let d = self.degree(0);
        self.adj.iter().all(|a| a.len() == d).then_some(d)
    }

    pub fn complement(&self) -> Graph {
        let mut g = Graph::empty(self.n).expect("vertex count is positive");
        for u in 0..self.n {
            for v in (u + 1)..self.n {
                if !self.has_edge(u, v) {
                    g.insert_edge(u, v).expect("complement edges are simple");
                }
            }
        }
        g.name = self.name.as_ref().map(|n| format!("{n}-complement"));
        g
    }

    /// Relabels vertices: vertex `v` of `self` becomes `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Graph> {
        let mut seen = vec![false; self.n];
        if perm.len() != self.n || perm.iter().any(|&p| p >= self.n || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::Invalid("relabeling is not a permutation".into()));
        }
        let mut g = Graph::new(self.n, self.edges().map(|(u, v)| (perm[u], perm[v])))?;
        g.name = self.name.clone();
        Ok(g)
    }

    pub fn adjacency_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| if self.has_edge(i, j) { 1.0 } else { 0.0 })
    }

    pub fn is_independent_set(&self, set: &[usize]) -> bool {
        set.iter()
            .enumerate()
            .all(|(i, &u)| set[i + 1..].iter().all(|&v| u != v && !self.has_edge(u, v)))
    }

    pub fn is_clique(&self, set: &[usize]) -> bool {
        set.iter()
            .enumerate()
            .all(|(i, &u)| set[i + 1..].iter().all(|&v| self.has_edge(u, v)))
    }

    pub fn is_proper_coloring(&self, colors: &[usize]) -> bool {
        colors.len() == self.n && self.edges().all(|(u, v)| colors[u] != colors[v])
    }

    pub fn triangle_count(&self) -> usize {
        self.edges()
            .map(|(u, v)| {
                self.adj[u]
                    .iter()
                    .filter(|&&w| w > v && self.has_edge(v, w))
                    .count()
            })
            .sum()
    }
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.adj == other.adj
    }
}

impl Eq for Graph {}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("name", &self.name)
            .field("vertices", &self.n)
            .field("edges", &self.edge_count())
            .finish()
    }
}

/// Parses an edge-list document into a validated [`Graph`].
pub fn load_graph(text: &str) -> Result<Graph> {
    Graph::from_edge_list(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_path_with_semicolons() {
        let g = load_graph("3; 0 1; 1 2").unwrap();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn parses_header_and_comments() {
        let g = load_graph("# triangle\nn=3\n0 1 # first\n1 2\n\n2 0\n").unwrap();
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.triangle_count(), 1);
    }

    #[test]
    fn rejects_self_loop_with_line() {
        match load_graph("2; 0 0") {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 1);
                assert!(message.contains("self-loop"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_duplicate_and_out_of_range() {
        let dup = load_graph("n=3\n0 1\n1 0\n").unwrap_err();
        assert!(matches!(dup, Error::Parse { line: 3, .. }), "{dup}");
        let oob = load_graph("n=3\n0 1\n1 3\n").unwrap_err();
        assert!(matches!(oob, Error::Parse { line: 3, .. }), "{oob}");
        assert!(load_graph("n=x\n").is_err());
        assert!(load_graph("n=3\n0\n").is_err());
        assert!(load_graph("").is_err());
    }

    #[test]
    fn complement_of_complete_is_empty() {
        let k4 = Graph::new(4, (0..4).flat_map(|u| ((u + 1)..4).map(move |v| (u, v)))).unwrap();
        let c = k4.complement();
        assert_eq!(c.edge_count(), 0);
        assert_eq!(c.complement(), k4);
    }

    #[test]
    fn edge_list_round_trip() {
        let g = Graph::new(5, [(0, 1), (1, 2), (3, 4), (0, 4)]).unwrap();
        assert_eq!(load_graph(&g.to_edge_list()).unwrap(), g);
    }

    #[test]
    fn relabel_validates_permutation() {
        let g = Graph::new(3, [(0, 1)]).unwrap();
        assert!(g.relabel(&[0, 0, 1]).is_err());
        let h = g.relabel(&[2, 1, 0]).unwrap();
        assert!(h.has_edge(2, 1));
    }
}
