#![allow(dead_code)]

use ghz_paradox::graph::Graph;
use proptest::prelude::*;

/// Random simple graphs on 1..=max_n vertices.
pub fn graphs(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(|n| {
        let pairs = n * (n - 1) / 2;
        proptest::collection::vec(any::<bool>(), pairs).prop_map(move |keep| {
            let edges = (0..n)
                .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
                .zip(keep)
                .filter_map(|(e, k)| k.then_some(e));
            Graph::new(n, edges).expect("valid edges")
        })
    })
}

/// A graph together with a permutation of its vertices.
pub fn graph_and_permutation(max_n: usize) -> impl Strategy<Value = (Graph, Vec<usize>)> {
    graphs(max_n).prop_flat_map(|g| {
        let n = g.vertex_count();
        (Just(g), Just((0..n).collect::<Vec<_>>()).prop_shuffle())
    })
}

pub fn brute_force_alpha(g: &Graph) -> usize {
    let n = g.vertex_count();
    (0u32..1 << n)
        .filter(|&mask| {
            let set: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
            g.is_independent_set(&set)
        })
        .map(|mask| mask.count_ones() as usize)
        .max()
        .unwrap_or(0)
}
