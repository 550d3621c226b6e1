//! Immutable undirected graphs in compressed adjacency form.
//!
//! Every [`Graph`] is normalized on construction: self-loops are dropped,
//! parallel edges are coalesced by summing their weights, and neighbor lists
//! are symmetric and sorted ascending. Edge weights are optional; algorithms
//! that work on the binary adjacency simply ignore them.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Hop distance assigned to nodes that cannot be reached.
pub const UNREACHABLE: usize = usize::MAX;

/// Default node cap for operations that materialize graph powers.
pub const DEFAULT_POWER_CAP: usize = 100_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("node id {id} out of range for a graph with {n} nodes")]
    NodeOutOfRange { id: usize, n: usize },
    #[error("edge ({u}, {v}) has nonpositive or non-finite weight {weight}")]
    BadWeight { u: usize, v: usize, weight: f64 },
    #[error("node weight at {index} must be strictly positive and finite, got {value}")]
    BadNodeWeight { index: usize, value: f64 },
    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("graph has {n} nodes, above the cap of {cap} for explicit powers")]
    TooLarge { n: usize, cap: usize },
    #[error("k must be at least 1")]
    ZeroPower,
}

/// An input edge: endpoints plus an optional explicit weight.
pub type Edge = (usize, usize, Option<f64>);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<usize>,
    weights: Option<Vec<f64>>,
}

impl Graph {
    /// Builds a normalized graph over `n` nodes.
    ///
    /// If any edge carries an explicit weight the graph becomes weighted and
    /// edges without one count as weight 1.
    pub fn build<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = Edge>,
    {
        let mut weighted = false;
        let mut pairs = Vec::new();
        for (u, v, w) in edges {
            for id in [u, v] {
                if id >= n {
                    return Err(GraphError::NodeOutOfRange { id, n });
                }
            }
            if let Some(weight) = w {
                if !(weight > 0.0 && weight.is_finite()) {
                    return Err(GraphError::BadWeight { u, v, weight });
                }
                weighted = true;
            }
            if u != v {
                pairs.push((u.min(v), u.max(v), w.unwrap_or(1.0)));
            }
        }
        pairs.sort_by_key(|e| (e.0, e.1));

        let mut merged: Vec<(usize, usize, f64)> = Vec::with_capacity(pairs.len());
        for (u, v, w) in pairs {
            match merged.last_mut() {
                Some(last) if last.0 == u && last.1 == v => last.2 += w,
                _ => merged.push((u, v, w)),
            }
        }
        Ok(Self::from_sorted_unique(n, &merged, weighted))
    }

    /// Unweighted convenience constructor.
    pub fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Result<Self, GraphError> {
        Self::build(n, pairs.iter().map(|&(u, v)| (u, v, None)))
    }

    /// `edges` must be sorted by `(u, v)` with `u < v` and contain no repeats.
    fn from_sorted_unique(n: usize, edges: &[(usize, usize, f64)], weighted: bool) -> Self {
        // A graph without edges carries no weights to remember.
        let weighted = weighted && !edges.is_empty();
        let mut degree = vec![0usize; n];
        for &(u, v, _) in edges {
            degree[u] += 1;
            degree[v] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut cursor = offsets[..n].to_vec();
        let mut targets = vec![0usize; 2 * edges.len()];
        let mut weights = if weighted {
            vec![0.0; 2 * edges.len()]
        } else {
            Vec::new()
        };
        // Scanning edges in (u, v) order fills every list in ascending order:
        // for a node x, partners u < x arrive first (sorted by u), then v > x.
        for &(u, v, w) in edges {
            for (a, b) in [(u, v), (v, u)] {
                let slot = cursor[a];
                targets[slot] = b;
                if weighted {
                    weights[slot] = w;
                }
                cursor[a] += 1;
            }
        }
        Graph {
            offsets,
            targets,
            weights: weighted.then_some(weights),
        }
    }

    pub fn empty(n: usize) -> Self {
        Self::from_sorted_unique(n, &[], false)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Number of undirected edges.
    #[inline]
    pub fn m(&self) -> usize {
        self.targets.len() / 2
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    /// Weights aligned with [`Graph::neighbors`], if the graph is weighted.
    #[inline]
    pub fn neighbor_weights(&self, v: usize) -> Option<&[f64]> {
        self.weights
            .as_ref()
            .map(|w| &w[self.offsets[v]..self.offsets[v + 1]])
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n()).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn is_weighted(&self) -> bool {
        self.weights.is_some()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n() && v < self.n() && self.neighbors(u).binary_search(&v).is_ok()
    }

    /// Weight of edge `uv`: the stored weight, 1 for unweighted graphs, or
    /// `None` if the edge does not exist.
    pub fn edge_weight(&self, u: usize, v: usize) -> Option<f64> {
        let pos = self.neighbors(u).binary_search(&v).ok()?;
        Some(self.neighbor_weights(u).map_or(1.0, |w| w[pos]))
    }

    /// Each undirected edge once, as `(u, v, weight)` with `u < v`, in
    /// ascending order. Unweighted edges report weight 1.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n()).flat_map(move |u| {
            let ws = self.neighbor_weights(u);
            self.neighbors(u)
                .iter()
                .enumerate()
                .filter(move |&(_, &v)| u < v)
                .map(move |(i, &v)| (u, v, ws.map_or(1.0, |w| w[i])))
        })
    }

    /// Copy of the graph with edge weights removed.
    pub fn unweighted(&self) -> Self {
        Graph {
            offsets: self.offsets.clone(),
            targets: self.targets.clone(),
            weights: None,
        }
    }

    /// Relabels nodes so that node `v` becomes `perm[v]`.
    pub fn permute(&self, perm: &[usize]) -> Result<Self, GraphError> {
        if perm.len() != self.n() {
            return Err(GraphError::LengthMismatch {
                expected: self.n(),
                got: perm.len(),
            });
        }
        let weighted = self.is_weighted();
        let edges = self
            .edges()
            .map(|(u, v, w)| (perm[u], perm[v], weighted.then_some(w)));
        Graph::build(self.n(), edges)
    }

    /// Hop distances from `source` by breadth-first traversal.
    pub fn bfs(&self, source: usize) -> Result<Distances, GraphError> {
        self.bfs_bounded(source, UNREACHABLE)
    }

    /// Like [`Graph::bfs`] but stops expanding at depth `max_depth`; nodes
    /// beyond it are reported as [`UNREACHABLE`].
    pub fn bfs_bounded(&self, source: usize, max_depth: usize) -> Result<Distances, GraphError> {
        if source >= self.n() {
            return Err(GraphError::NodeOutOfRange {
                id: source,
                n: self.n(),
            });
        }
        let mut dist = vec![UNREACHABLE; self.n()];
        dist[source] = 0;
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            let du = dist[u];
            if du >= max_depth {
                continue;
            }
            for &v in self.neighbors(u) {
                if dist[v] == UNREACHABLE {
                    dist[v] = du + 1;
                    queue.push_back(v);
                }
            }
        }
        Ok(Distances { source, dist })
    }

    /// Nodes within `radius` hops of `source` (inclusive), paired with their
    /// distance, in BFS order. Touches only the explored ball.
    pub fn ball(&self, source: usize, radius: usize) -> Vec<(usize, usize)> {
        let mut seen = std::collections::HashMap::new();
        seen.insert(source, 0usize);
        let mut order = vec![(source, 0)];
        let mut head = 0;
        while head < order.len() {
            let (u, du) = order[head];
            head += 1;
            if du == radius {
                continue;
            }
            for &v in self.neighbors(u) {
                if let std::collections::hash_map::Entry::Vacant(e) = seen.entry(v) {
                    e.insert(du + 1);
                    order.push((v, du + 1));
                }
            }
        }
        order
    }

    /// The `k`-th power: `uv` is an edge iff `1 <= dist(u, v) <= k`.
    /// Refuses graphs with more than `cap` nodes.
    pub fn power(&self, k: usize, cap: usize) -> Result<Self, GraphError> {
        if k == 0 {
            return Err(GraphError::ZeroPower);
        }
        if self.n() > cap {
            return Err(GraphError::TooLarge { n: self.n(), cap });
        }
        use rayon::prelude::*;
        let lists: Vec<Vec<usize>> = (0..self.n())
            .into_par_iter()
            .map(|u| {
                let mut near: Vec<usize> = self
                    .ball(u, k)
                    .into_iter()
                    .skip(1)
                    .map(|(v, _)| v)
                    .collect();
                near.sort_unstable();
                near
            })
            .collect();
        let mut offsets = Vec::with_capacity(self.n() + 1);
        offsets.push(0);
        for l in &lists {
            offsets.push(offsets.last().unwrap() + l.len());
        }
        Ok(Graph {
            offsets,
            targets: lists.concat(),
            weights: None,
        })
    }

    /// Connected components: `(count, component id per node)`, with ids
    /// assigned in order of each component's smallest node.
    pub fn connected_components(&self) -> (usize, Vec<usize>) {
        let n = self.n();
        let mut comp = vec![UNREACHABLE; n];
        let mut count = 0;
        let mut stack = Vec::new();
        for s in 0..n {
            if comp[s] != UNREACHABLE {
                continue;
            }
            comp[s] = count;
            stack.push(s);
            while let Some(u) = stack.pop() {
                for &v in self.neighbors(u) {
                    if comp[v] == UNREACHABLE {
                        comp[v] = count;
                        stack.push(v);
                    }
                }
            }
            count += 1;
        }
        (count, comp)
    }
}

/// Hop distances from a single source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Distances {
    pub source: usize,
    pub dist: Vec<usize>,
}

impl Distances {
    pub fn get(&self, v: usize) -> Option<usize> {
        match self.dist[v] {
            UNREACHABLE => None,
            d => Some(d),
        }
    }
}

/// Strictly positive per-node weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeWeights(Vec<f64>);

impl NodeWeights {
    pub fn new(values: Vec<f64>) -> Result<Self, GraphError> {
        if let Some((index, &value)) = values
            .iter()
            .enumerate()
            .find(|(_, &x)| !(x > 0.0 && x.is_finite()))
        {
            return Err(GraphError::BadNodeWeight { index, value });
        }
        Ok(NodeWeights(values))
    }

    pub fn ones(n: usize) -> Self {
        NodeWeights(vec![1.0; n])
    }

    /// Uniform draws from `[lo, hi)` with a seeded generator.
    pub fn uniform(n: usize, lo: f64, hi: f64, seed: u64) -> Result<Self, GraphError> {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        Self::new((0..n).map(|_| rng.gen_range(lo..hi)).collect())
    }

    /// Checks that the vector matches a graph's node count.
    pub fn check_len(&self, n: usize) -> Result<(), GraphError> {
        if self.0.len() != n {
            return Err(GraphError::LengthMismatch {
                expected: n,
                got: self.0.len(),
            });
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// Total weight of the given nodes.
    pub fn total<'a>(&self, nodes: impl IntoIterator<Item = &'a usize>) -> f64 {
        nodes.into_iter().map(|&v| self.0[v]).sum()
    }
}

impl std::ops::Index<usize> for NodeWeights {
    type Output = f64;

    fn index(&self, v: usize) -> &f64 {
        &self.0[v]
    }
}
