//! Shared generators for the integration tests: seeded random connected
//! hypergraphs built as a shuffled chain of overlapping hyperedges (which
//! guarantees connectivity and excludes isolated nodes) plus extra random
//! edges.

use hyperwalk_core::Hypergraph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn random_connected_hypergraph(
    seed: u64,
    max_nodes: usize,
    max_extra_edges: usize,
    max_size: usize,
) -> Hypergraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(3..=max_nodes);
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        perm.swap(i, j);
    }

    let mut edges: Vec<Vec<usize>> = Vec::new();
    let mut start = 0;
    while start + 1 < n {
        let size = rng.random_range(2..=max_size.min(n - start).max(2));
        edges.push(perm[start..start + size].to_vec());
        start += size - 1;
    }
    for _ in 0..rng.random_range(0..=max_extra_edges) {
        let size = rng.random_range(2..=max_size.min(n));
        let mut edge: Vec<usize> = Vec::with_capacity(size);
        while edge.len() < size {
            let v = rng.random_range(0..n);
            if !edge.contains(&v) {
                edge.push(v);
            }
        }
        edges.push(edge);
    }
    Hypergraph::from_edges(&edges).expect("generator produces valid hypergraphs")
}

/// All hyperedges of size 2: a connected ordinary graph in hypergraph form.
pub fn random_connected_graph(seed: u64, max_nodes: usize, max_extra_edges: usize) -> Hypergraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(3..=max_nodes);
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        perm.swap(i, j);
    }
    let mut edges: Vec<Vec<usize>> = (0..n - 1).map(|k| vec![perm[k], perm[k + 1]]).collect();
    for _ in 0..rng.random_range(0..=max_extra_edges) {
        let a = rng.random_range(0..n);
        let b = rng.random_range(0..n);
        if a != b {
            edges.push(vec![a, b]);
        }
    }
    Hypergraph::from_edges(&edges).expect("generator produces valid hypergraphs")
}
