//! Exact maximum clique / independent set by branch and bound with a greedy
//! coloring bound (Tomita-style MCQ) over 128-bit vertex sets.

use super::Graph;
use crate::error::{Error, Result};

pub const MAX_SEARCH_VERTICES: usize = 128;
pub const DEFAULT_NODE_BUDGET: u64 = 50_000_000;

/// Size and one witness of a maximum clique or independent set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexSet {
    pub size: usize,
    pub vertices: Vec<usize>,
}

pub fn independence_number(g: &Graph) -> Result<VertexSet> {
    independence_number_with_budget(g, DEFAULT_NODE_BUDGET)
}

pub fn independence_number_with_budget(g: &Graph, budget: u64) -> Result<VertexSet> {
    max_clique(g, true, budget, "independence number")
}

pub fn clique_number(g: &Graph) -> Result<VertexSet> {
    max_clique(g, false, DEFAULT_NODE_BUDGET, "clique number")
}

struct Search {
    // Neighborhoods in the working graph, indexed by position in `order`.
    nbr: Vec<u128>,
    order: Vec<usize>,
    best: Vec<usize>,
    current: Vec<usize>,
    nodes: u64,
    budget: u64,
}

fn max_clique(g: &Graph, complement: bool, budget: u64, what: &'static str) -> Result<VertexSet> {
    let n = g.vertex_count();
    if n > MAX_SEARCH_VERTICES {
        return Err(Error::TooLarge {
            what,
            vertices: n,
            limit: MAX_SEARCH_VERTICES,
        });
    }
    let adjacent = |u: usize, v: usize| u != v && (g.has_edge(u, v) != complement);
    let degree = |u: usize| (0..n).filter(|&v| adjacent(u, v)).count();

    // Degree-descending, ties to lowest index.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(degree(v)), v));

    let nbr = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| adjacent(order[i], order[j]))
                .fold(0u128, |acc, j| acc | (1u128 << j))
        })
        .collect();

    let mut s = Search {
        nbr,
        order,
        best: Vec::new(),
        current: Vec::new(),
        nodes: 0,
        budget,
    };
    let all = if n == 128 { u128::MAX } else { (1u128 << n) - 1 };
    s.expand(all).map_err(|_| Error::BudgetExhausted { what, budget })?;

    let mut vertices: Vec<usize> = s.best.iter().map(|&i| s.order[i]).collect();
    vertices.sort_unstable();
    Ok(VertexSet {
        size: vertices.len(),
        vertices,
    })
}

impl Search {
    fn expand(&mut self, candidates: u128) -> std::result::Result<(), ()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(());
        }
        let (verts, bounds) = self.color_sort(candidates);
        let mut cand = candidates;
        for idx in (0..verts.len()).rev() {
            if self.current.len() + bounds[idx] <= self.best.len() {
                return Ok(());
            }
            let v = verts[idx];
            self.current.push(v);
            let next = cand & self.nbr[v];
            if next == 0 {
                if self.current.len() > self.best.len() {
                    self.best = self.current.clone();
                }
            } else {
                self.expand(next)?;
            }
            self.current.pop();
            cand &= !(1u128 << v);
        }
        Ok(())
    }

    /// Greedy sequential coloring of the candidates. Returns vertices ordered
    /// by color class with the running color count as an upper bound.
    fn color_sort(&self, candidates: u128) -> (Vec<usize>, Vec<usize>) {
        let mut verts = Vec::with_capacity(candidates.count_ones() as usize);
        let mut bounds = Vec::with_capacity(verts.capacity());
        let mut uncolored = candidates;
        let mut color = 0;
        while uncolored != 0 {
            color += 1;
            let mut avail = uncolored;
            while avail != 0 {
                let v = avail.trailing_zeros() as usize;
                avail &= !(1u128 << v);
                avail &= !self.nbr[v];
                uncolored &= !(1u128 << v);
                verts.push(v);
                bounds.push(color);
            }
        }
        (verts, bounds)
    }
}
