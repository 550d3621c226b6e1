//! Small deterministic graph families and seeded random graphs.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::Graph;

pub fn path(n: usize) -> Graph {
    let pairs: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    Graph::from_pairs(n, &pairs).expect("valid path")
}

pub fn cycle(n: usize) -> Graph {
    let mut pairs: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    if n > 2 {
        pairs.push((n - 1, 0));
    }
    Graph::from_pairs(n, &pairs).expect("valid cycle")
}

/// Node 0 is the center.
pub fn star(leaves: usize) -> Graph {
    let pairs: Vec<_> = (1..=leaves).map(|i| (0, i)).collect();
    Graph::from_pairs(leaves + 1, &pairs).expect("valid star")
}

pub fn complete(n: usize) -> Graph {
    let pairs: Vec<_> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect();
    Graph::from_pairs(n, &pairs).expect("valid clique")
}

/// `rows x cols` lattice with node id `cols * i + j`. With `diagonals` each
/// pixel also touches its four diagonal neighbors (8-connectivity).
pub fn grid(rows: usize, cols: usize, diagonals: bool) -> Graph {
    let id = |i: usize, j: usize| cols * i + j;
    let mut pairs = Vec::new();
    for i in 0..rows {
        for j in 0..cols {
            if j + 1 < cols {
                pairs.push((id(i, j), id(i, j + 1)));
            }
            if i + 1 < rows {
                pairs.push((id(i, j), id(i + 1, j)));
                if diagonals {
                    if j + 1 < cols {
                        pairs.push((id(i, j), id(i + 1, j + 1)));
                    }
                    if j > 0 {
                        pairs.push((id(i, j), id(i + 1, j - 1)));
                    }
                }
            }
        }
    }
    Graph::from_pairs(rows * cols, &pairs).expect("valid grid")
}

/// Erdős–Rényi `G(n, p)`, seeded.
pub fn gnp(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                pairs.push((u, v));
            }
        }
    }
    Graph::from_pairs(n, &pairs).expect("valid gnp")
}

/// Sparse random graph with `m` distinct edges drawn uniformly, for sizes
/// where `gnp`'s quadratic scan is too slow.
pub fn gnm(n: usize, m: usize, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = std::collections::HashSet::with_capacity(m);
    let max = n.saturating_mul(n.saturating_sub(1)) / 2;
    let target = m.min(max);
    while seen.len() < target {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u != v {
            seen.insert((u.min(v), u.max(v)));
        }
    }
    let mut pairs: Vec<_> = seen.into_iter().collect();
    pairs.sort_unstable();
    Graph::from_pairs(n, &pairs).expect("valid gnm")
}

/// Seeded uniformly random permutation of `0..n`.
pub fn permutation(n: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng);
    perm
}

/// Disjoint union; nodes of `b` are shifted by `a.n()`.
pub fn disjoint_union(a: &Graph, b: &Graph) -> Graph {
    let shift = a.n();
    let weighted = a.is_weighted() || b.is_weighted();
    let edges = a
        .edges()
        .chain(b.edges().map(|(u, v, w)| (u + shift, v + shift, w)))
        .map(|(u, v, w)| (u, v, weighted.then_some(w)));
    Graph::build(a.n() + b.n(), edges).expect("valid union")
}
