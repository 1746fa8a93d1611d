//! Exact chromatic number by DSATUR-ordered backtracking.

use serde::Serialize;

use super::independence::DEFAULT_NODE_BUDGET;
use super::Graph;
use crate::error::{Error, Result};

/// A proper vertex coloring with colors `0..color_count`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Coloring {
    pub color_count: usize,
    pub colors: Vec<usize>,
}

impl Coloring {
    /// Vertex groups, one per color, each sorted ascending.
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut classes = vec![Vec::new(); self.color_count];
        for (v, &c) in self.colors.iter().enumerate() {
            classes[c].push(v);
        }
        classes
    }

    pub fn class_sizes(&self) -> Vec<usize> {
        self.classes().iter().map(Vec::len).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChromaticOutcome {
    /// The chromatic number is `coloring.color_count`.
    Exact(Coloring),
    /// No proper coloring with at most `upper_limit` colors exists.
    ExceedsLimit { upper_limit: usize },
}

impl ChromaticOutcome {
    pub fn value(&self) -> Option<usize> {
        match self {
            Self::Exact(c) => Some(c.color_count),
            Self::ExceedsLimit { .. } => None,
        }
    }
}

pub fn chromatic_number(g: &Graph, upper_limit: usize) -> Result<ChromaticOutcome> {
    chromatic_number_with_budget(g, upper_limit, DEFAULT_NODE_BUDGET)
}

pub fn chromatic_number_with_budget(
    g: &Graph,
    upper_limit: usize,
    budget: u64,
) -> Result<ChromaticOutcome> {
    if upper_limit == 0 {
        return Err(Error::Invalid("color limit must be positive".into()));
    }
    let lower = if g.edge_count() == 0 { 1 } else { greedy_clique(g).max(2) };
    let mut nodes = 0u64;
    for k in lower..=upper_limit.min(g.vertex_count()) {
        let mut state = Dsatur::new(g, k);
        match state.solve(&mut nodes, budget) {
            Some(true) => {
                return Ok(ChromaticOutcome::Exact(Coloring {
                    color_count: k,
                    colors: state.colors.iter().map(|c| c.expect("all colored")).collect(),
                }))
            }
            Some(false) => {}
            None => {
                return Err(Error::BudgetExhausted {
                    what: "chromatic number",
                    budget,
                })
            }
        }
    }
    Ok(ChromaticOutcome::ExceedsLimit { upper_limit })
}

/// Clique found greedily in degree order; a lower bound on the chromatic number.
fn greedy_clique(g: &Graph) -> usize {
    let n = g.vertex_count();
    let mut best = 1;
    for start in 0..n {
        let mut clique = vec![start];
        let mut cand: Vec<usize> = g.neighbors(start).to_vec();
        cand.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
        for v in cand {
            if clique.iter().all(|&u| g.has_edge(u, v)) {
                clique.push(v);
            }
        }
        best = best.max(clique.len());
    }
    best
}

struct Dsatur<'a> {
    g: &'a Graph,
    k: usize,
    colors: Vec<Option<usize>>,
    // neighbor_colors[v][c] counts colored neighbors of v with color c.
    neighbor_colors: Vec<Vec<u32>>,
}

impl<'a> Dsatur<'a> {
    fn new(g: &'a Graph, k: usize) -> Self {
        let n = g.vertex_count();
        Self {
            g,
            k,
            colors: vec![None; n],
            neighbor_colors: vec![vec![0; k]; n],
        }
    }

    fn saturation(&self, v: usize) -> usize {
        self.neighbor_colors[v].iter().filter(|&&c| c > 0).count()
    }

    /// Uncolored vertex of maximum saturation, then maximum degree, then lowest index.
    fn pick(&self) -> Option<usize> {
        (0..self.g.vertex_count())
            .filter(|&v| self.colors[v].is_none())
            .max_by_key(|&v| {
                (
                    self.saturation(v),
                    self.g.degree(v),
                    std::cmp::Reverse(v),
                )
            })
    }

    fn assign(&mut self, v: usize, c: Option<usize>) {
        if let Some(old) = self.colors[v] {
            for &u in self.g.neighbors(v) {
                self.neighbor_colors[u][old] -= 1;
            }
        }
        self.colors[v] = c;
        if let Some(new) = c {
            for &u in self.g.neighbors(v) {
                self.neighbor_colors[u][new] += 1;
            }
        }
    }

    /// `Some(true)` when a k-coloring was found, `Some(false)` when refuted,
    /// `None` when the node budget ran out.
    fn solve(&mut self, nodes: &mut u64, budget: u64) -> Option<bool> {
        *nodes += 1;
        if *nodes > budget {
            return None;
        }
        let Some(v) = self.pick() else {
            return Some(true);
        };
        // Symmetry breaking: never open more than one fresh color.
        let used = self.colors.iter().flatten().copied().max().map_or(0, |m| m + 1);
        for c in 0..self.k.min(used + 1) {
            if self.neighbor_colors[v][c] > 0 {
                continue;
            }
            self.assign(v, Some(c));
            match self.solve(nodes, budget) {
                Some(false) => {}
                other => return other,
            }
            self.assign(v, None);
        }
        Some(false)
    }
}
