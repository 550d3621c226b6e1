//! Partitioning around k-MIS centroids and contraction into a coarse graph.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, GraphError, NodeWeights};
use crate::kmis::{k_mis, KMisError, KMisResult};
use crate::propagate::{min_rounds, NO_LABEL};
use crate::ranking::{
    rank_by_degree_rule, rank_by_weight_rule, rank_static, Ranking, RankingError, StaticRanking,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoarsenError {
    #[error("node {node} is not within k hops of any centroid")]
    Uncovered { node: usize },
    #[error("centroid {centroid} was claimed by centroid {by}")]
    CentroidCaptured { centroid: usize, by: usize },
    #[error("assignment has {got} entries, graph has {expected} nodes")]
    LengthMismatch { expected: usize, got: usize },
    #[error("node {node} is assigned to {target}, which is not a centroid")]
    NotACentroid { node: usize, target: usize },
    #[error(transparent)]
    KMis(#[from] KMisError),
    #[error(transparent)]
    Ranking(#[from] RankingError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Node-to-centroid map; each fiber is one cluster.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    /// `assignment[v]` is the centroid of `v`'s cluster.
    pub assignment: Vec<usize>,
    /// Centroids, ascending. Coarse node `i` is `centroids[i]`.
    pub centroids: Vec<usize>,
}

impl Partition {
    pub fn identity(n: usize) -> Self {
        Partition {
            assignment: (0..n).collect(),
            centroids: (0..n).collect(),
        }
    }

    /// Validates an arbitrary assignment: every target must map to itself.
    pub fn from_assignment(assignment: Vec<usize>) -> Result<Self, CoarsenError> {
        let n = assignment.len();
        for (node, &target) in assignment.iter().enumerate() {
            if target >= n || assignment[target] != target {
                return Err(CoarsenError::NotACentroid { node, target });
            }
        }
        let centroids = (0..n).filter(|&v| assignment[v] == v).collect();
        Ok(Partition {
            assignment,
            centroids,
        })
    }

    pub fn cluster_count(&self) -> usize {
        self.centroids.len()
    }

    /// Dense coarse index per original node (`NO_LABEL` for non-centroids).
    pub fn centroid_index(&self) -> Vec<usize> {
        let mut idx = vec![NO_LABEL; self.assignment.len()];
        for (i, &c) in self.centroids.iter().enumerate() {
            idx[c] = i;
        }
        idx
    }

    /// Members of every cluster, in centroid order, each ascending.
    pub fn fibers(&self) -> Vec<Vec<usize>> {
        let idx = self.centroid_index();
        let mut out = vec![Vec::new(); self.centroids.len()];
        for (v, &c) in self.assignment.iter().enumerate() {
            out[idx[c]].push(v);
        }
        out
    }
}

/// Assigns each node to the centroid whose priority reaches it first under
/// `k` rounds of min-label propagation seeded only at the centroids.
pub fn cluster(
    g: &Graph,
    k: usize,
    pi: &Ranking,
    s: &KMisResult,
) -> Result<Partition, CoarsenError> {
    let n = g.n();
    pi.check_len(n)?;
    let mut by_priority = vec![NO_LABEL; n];
    let mut labels = vec![NO_LABEL; n];
    for &c in &s.selected {
        by_priority[pi.priority(c)] = c;
        labels[c] = pi.priority(c);
    }
    let mut scratch = Vec::with_capacity(n);
    min_rounds(g, &mut labels, &mut scratch, k);

    let mut assignment = Vec::with_capacity(n);
    for (v, &l) in labels.iter().enumerate() {
        if l == NO_LABEL {
            return Err(CoarsenError::Uncovered { node: v });
        }
        assignment.push(by_priority[l]);
    }
    for &c in &s.selected {
        if assignment[c] != c {
            return Err(CoarsenError::CentroidCaptured {
                centroid: c,
                by: assignment[c],
            });
        }
    }
    Ok(Partition {
        assignment,
        centroids: s.selected.clone(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum EdgeAgg {
    #[default]
    Sum,
    Max,
    Min,
    Mean,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum NodeAgg {
    #[default]
    KeepCentroid,
    Sum,
    Mean,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct AggregationSpec {
    pub edge: EdgeAgg,
    pub node: NodeAgg,
    /// Record the aggregated weight of intra-cluster edges per coarse node.
    pub keep_intra: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoarsenedGraph {
    /// Coarse graph over dense indices; index `i` is `partition.centroids[i]`.
    pub graph: Graph,
    pub node_values: Option<Vec<f64>>,
    /// Aggregated intra-cluster edge weight per coarse node, when requested.
    pub intra_weights: Option<Vec<f64>>,
    pub partition: Partition,
}

impl CoarsenedGraph {
    pub fn centroids(&self) -> &[usize] {
        &self.partition.centroids
    }

    /// Coarse index of a centroid.
    pub fn index_of(&self, centroid: usize) -> Option<usize> {
        self.partition.centroids.binary_search(&centroid).ok()
    }
}

fn merge(agg: EdgeAgg, acc: (f64, usize), w: f64) -> (f64, usize) {
    match agg {
        EdgeAgg::Sum | EdgeAgg::Mean => (acc.0 + w, acc.1 + 1),
        EdgeAgg::Max => (acc.0.max(w), acc.1 + 1),
        EdgeAgg::Min => (acc.0.min(w), acc.1 + 1),
    }
}

fn finish(agg: EdgeAgg, acc: (f64, usize)) -> f64 {
    match agg {
        EdgeAgg::Mean => acc.0 / acc.1 as f64,
        _ => acc.0,
    }
}

/// Contracts every cluster of `p` to its centroid. Each original edge whose
/// endpoints lie in different clusters contributes its weight (1 when
/// unweighted) to the coarse edge between the two centroids.
pub fn reduce(
    g: &Graph,
    p: &Partition,
    agg: &AggregationSpec,
    node_values: Option<&[f64]>,
) -> Result<CoarsenedGraph, CoarsenError> {
    let n = g.n();
    if p.assignment.len() != n {
        return Err(CoarsenError::LengthMismatch {
            expected: n,
            got: p.assignment.len(),
        });
    }
    if let Some(vals) = node_values {
        if vals.len() != n {
            return Err(CoarsenError::LengthMismatch {
                expected: n,
                got: vals.len(),
            });
        }
    }
    let idx = p.centroid_index();
    for (v, &c) in p.assignment.iter().enumerate() {
        if c >= n || idx[c] == NO_LABEL {
            return Err(CoarsenError::NotACentroid { node: v, target: c });
        }
    }
    let coarse = |v: usize| idx[p.assignment[v]];

    // (a, b, w) per original edge, in edge order; intra-cluster edges have a == b.
    let mut contributions: Vec<(usize, usize, f64)> = (0..n)
        .into_par_iter()
        .flat_map_iter(|u| {
            let ws = g.neighbor_weights(u);
            g.neighbors(u)
                .iter()
                .enumerate()
                .filter(move |&(_, &v)| u < v)
                .map(move |(i, &v)| {
                    let (a, b) = (coarse(u), coarse(v));
                    (a.min(b), a.max(b), ws.map_or(1.0, |w| w[i]))
                })
        })
        .collect();
    // Stable sort keeps edge order inside each group, so float merges are
    // reproducible regardless of thread count.
    contributions.par_sort_by_key(|&(a, b, _)| (a, b));

    let s = p.cluster_count();
    let mut edges: Vec<(usize, usize, Option<f64>)> = Vec::new();
    let mut intra = agg.keep_intra.then(|| vec![(0.0, 0usize); s]);
    let mut i = 0;
    while i < contributions.len() {
        let (a, b, w0) = contributions[i];
        let init = (w0, 1usize);
        let mut acc = init;
        i += 1;
        while i < contributions.len() && contributions[i].0 == a && contributions[i].1 == b {
            acc = merge(agg.edge, acc, contributions[i].2);
            i += 1;
        }
        if a == b {
            if let Some(intra) = intra.as_mut() {
                intra[a] = acc;
            }
        } else {
            edges.push((a, b, Some(finish(agg.edge, acc))));
        }
    }
    let graph = Graph::build(s, edges)?;

    let node_values = node_values.map(|vals| match agg.node {
        NodeAgg::KeepCentroid => p.centroids.iter().map(|&c| vals[c]).collect(),
        NodeAgg::Sum | NodeAgg::Mean => {
            let mut sums = vec![0.0; s];
            let mut counts = vec![0usize; s];
            for v in 0..n {
                sums[coarse(v)] += vals[v];
                counts[coarse(v)] += 1;
            }
            if agg.node == NodeAgg::Mean {
                for (x, c) in sums.iter_mut().zip(&counts) {
                    *x /= *c as f64;
                }
            }
            sums
        }
    });

    Ok(CoarsenedGraph {
        graph,
        node_values,
        intra_weights: intra.map(|v| {
            v.into_iter()
                .map(|acc| {
                    if acc.1 == 0 {
                        0.0
                    } else {
                        finish(agg.edge, acc)
                    }
                })
                .collect()
        }),
        partition: p.clone(),
    })
}

/// How to order nodes before selection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum RankingSpec {
    /// Decreasing `x_v / [(A + I)^k 1]_v`.
    KDegree,
    /// Decreasing `x_v / [(A + I)^k x]_v`.
    KWeight,
    Static(StaticRanking),
}

impl RankingSpec {
    pub fn rank(&self, g: &Graph, x: &NodeWeights, k: usize) -> Result<Ranking, RankingError> {
        match self {
            RankingSpec::KDegree => rank_by_degree_rule(g, x, k),
            RankingSpec::KWeight => rank_by_weight_rule(g, x, k),
            RankingSpec::Static(kind) => rank_static(kind, g.n()),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseTimings {
    pub ranking: Duration,
    pub kmis: Duration,
    pub reduce: Duration,
}

impl PhaseTimings {
    pub fn total(&self) -> Duration {
        self.ranking + self.kmis + self.reduce
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Coarsening {
    pub coarse: CoarsenedGraph,
    pub kmis: KMisResult,
    pub ranking: Ranking,
    pub timings: PhaseTimings,
}

/// rank, select, cluster and reduce. `x` (default all ones) feeds the
/// weight-aware rankings and is the node attribute that gets aggregated.
///
/// `k = 0` performs no reduction: the output is `g` itself with the
/// identity assignment.
pub fn coarsen_pipeline(
    g: &Graph,
    k: usize,
    ranking: &RankingSpec,
    agg: &AggregationSpec,
    x: Option<&NodeWeights>,
) -> Result<Coarsening, CoarsenError> {
    let n = g.n();
    let ones;
    let x = match x {
        Some(x) => {
            x.check_len(n)?;
            x
        }
        None => {
            ones = NodeWeights::ones(n);
            &ones
        }
    };
    let mut timings = PhaseTimings::default();

    let t = Instant::now();
    let pi = if k == 0 {
        Ranking::node_id(n)
    } else {
        ranking.rank(g, x, k)?
    };
    timings.ranking = t.elapsed();

    if k == 0 {
        return Ok(Coarsening {
            coarse: CoarsenedGraph {
                graph: g.clone(),
                node_values: Some(x.as_slice().to_vec()),
                intra_weights: agg.keep_intra.then(|| vec![0.0; n]),
                partition: Partition::identity(n),
            },
            kmis: KMisResult {
                selected: (0..n).collect(),
                rounds: 0,
                k: 0,
            },
            ranking: pi,
            timings,
        });
    }

    let t = Instant::now();
    let s = k_mis(g, k, &pi)?;
    timings.kmis = t.elapsed();

    let t = Instant::now();
    let p = cluster(g, k, &pi, &s)?;
    let coarse = reduce(g, &p, agg, Some(x.as_slice()))?;
    timings.reduce = t.elapsed();

    Ok(Coarsening {
        coarse,
        kmis: s,
        ranking: pi,
        timings,
    })
}
