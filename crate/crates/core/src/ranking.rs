//! Injective node priorities and the k-walk weight heuristics.
//!
//! A [`Ranking`] stores, for every node, its position in the greedy order:
//! position 0 is selected first. Score-based rankings compare `(score, id)`
//! pairs, so ties are always broken by ascending node id and the order is
//! injective by construction.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, GraphError, NodeWeights};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RankingError {
    #[error("ranking has {got} entries but the graph has {expected} nodes")]
    LengthMismatch { expected: usize, got: usize },
    #[error("priority {value} is shared by nodes {first} and {second}")]
    NotInjective {
        value: u64,
        first: usize,
        second: usize,
    },
    #[error("score for node {0} is NaN")]
    NanScore(usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ranking {
    position: Vec<usize>,
}

impl Ranking {
    /// Identity order: node 0 first.
    pub fn node_id(n: usize) -> Self {
        Ranking {
            position: (0..n).collect(),
        }
    }

    /// Builds a ranking from arbitrary distinct priority values; smaller
    /// values come first. Repeated values are rejected.
    pub fn from_priorities(priorities: &[u64]) -> Result<Self, RankingError> {
        let mut order: Vec<usize> = (0..priorities.len()).collect();
        order.sort_by_key(|&v| priorities[v]);
        for w in order.windows(2) {
            if priorities[w[0]] == priorities[w[1]] {
                return Err(RankingError::NotInjective {
                    value: priorities[w[0]],
                    first: w[0].min(w[1]),
                    second: w[0].max(w[1]),
                });
            }
        }
        Ok(Self::from_order(&order))
    }

    /// Ascending `(score, node id)` order.
    pub fn ascending(scores: &[f64]) -> Result<Self, RankingError> {
        if let Some(v) = scores.iter().position(|s| s.is_nan()) {
            return Err(RankingError::NanScore(v));
        }
        let mut order: Vec<usize> = (0..scores.len()).collect();
        order.par_sort_by(|&a, &b| scores[a].total_cmp(&scores[b]).then(a.cmp(&b)));
        Ok(Self::from_order(&order))
    }

    /// Descending score order, ties by ascending node id.
    pub fn descending(scores: &[f64]) -> Result<Self, RankingError> {
        if let Some(v) = scores.iter().position(|s| s.is_nan()) {
            return Err(RankingError::NanScore(v));
        }
        let mut order: Vec<usize> = (0..scores.len()).collect();
        order.par_sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
        Ok(Self::from_order(&order))
    }

    /// `order[i]` is the node selected `i`-th. Must be a permutation.
    fn from_order(order: &[usize]) -> Self {
        let mut position = vec![0; order.len()];
        for (i, &v) in order.iter().enumerate() {
            position[v] = i;
        }
        Ranking { position }
    }

    pub fn len(&self) -> usize {
        self.position.len()
    }

    pub fn is_empty(&self) -> bool {
        self.position.is_empty()
    }

    /// Position of `v` in the greedy order (0 = first).
    #[inline]
    pub fn priority(&self, v: usize) -> usize {
        self.position[v]
    }

    pub fn priorities(&self) -> &[usize] {
        &self.position
    }

    /// Nodes in selection order.
    pub fn order(&self) -> Vec<usize> {
        let mut order = vec![0; self.len()];
        for (v, &p) in self.position.iter().enumerate() {
            order[p] = v;
        }
        order
    }

    /// The ranking carried along a node relabeling `v -> perm[v]`.
    pub fn permute(&self, perm: &[usize]) -> Self {
        let mut position = vec![0; self.len()];
        for (v, &p) in self.position.iter().enumerate() {
            position[perm[v]] = p;
        }
        Ranking { position }
    }

    pub fn check_len(&self, n: usize) -> Result<(), RankingError> {
        if self.len() != n {
            return Err(RankingError::LengthMismatch {
                expected: n,
                got: self.len(),
            });
        }
        Ok(())
    }
}

/// `c_k = (A + I)^k x` on the binary adjacency, by `k` sparse products.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkVector(pub Vec<f64>);

pub fn walk_counts(g: &Graph, x: &NodeWeights, k: usize) -> Result<WalkVector, GraphError> {
    x.check_len(g.n())?;
    let mut cur = x.as_slice().to_vec();
    let mut next = vec![0.0; g.n()];
    for _ in 0..k {
        next.par_iter_mut().enumerate().for_each(|(v, out)| {
            *out = cur[v] + g.neighbors(v).iter().map(|&u| cur[u]).sum::<f64>();
        });
        std::mem::swap(&mut cur, &mut next);
    }
    Ok(WalkVector(cur))
}

/// `w(v) = x_v / [(A + I)^k 1]_v`.
pub fn degree_rule_scores(g: &Graph, x: &NodeWeights, k: usize) -> Result<Vec<f64>, GraphError> {
    x.check_len(g.n())?;
    let c = walk_counts(g, &NodeWeights::ones(g.n()), k)?;
    Ok(x.as_slice().iter().zip(&c.0).map(|(a, b)| a / b).collect())
}

/// `w(v) = x_v / [(A + I)^k x]_v`.
pub fn weight_rule_scores(g: &Graph, x: &NodeWeights, k: usize) -> Result<Vec<f64>, GraphError> {
    let c = walk_counts(g, x, k)?;
    Ok(x.as_slice().iter().zip(&c.0).map(|(a, b)| a / b).collect())
}

/// Larger degree-rule score first.
pub fn rank_by_degree_rule(g: &Graph, x: &NodeWeights, k: usize) -> Result<Ranking, RankingError> {
    Ranking::descending(&degree_rule_scores(g, x, k)?)
}

/// Larger weight-rule score first.
pub fn rank_by_weight_rule(g: &Graph, x: &NodeWeights, k: usize) -> Result<Ranking, RankingError> {
    Ranking::descending(&weight_rule_scores(g, x, k)?)
}

/// Rankings that do not depend on graph structure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum StaticRanking {
    NodeId,
    Random {
        seed: u64,
    },
    Constant,
    /// Higher score is selected first, ties by node id.
    External(Vec<f64>),
}

pub fn rank_static(kind: &StaticRanking, n: usize) -> Result<Ranking, RankingError> {
    match kind {
        StaticRanking::NodeId | StaticRanking::Constant => Ok(Ranking::node_id(n)),
        StaticRanking::Random { seed } => {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(*seed);
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut rng);
            Ok(Ranking::from_order(&order))
        }
        StaticRanking::External(scores) => {
            if scores.len() != n {
                return Err(RankingError::LengthMismatch {
                    expected: n,
                    got: scores.len(),
                });
            }
            Ranking::descending(scores)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> Graph {
        Graph::from_pairs(3, &[(0, 1), (1, 2)]).unwrap()
    }

    fn star3() -> Graph {
        Graph::from_pairs(4, &[(0, 1), (0, 2), (0, 3)]).unwrap()
    }

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12)
    }

    #[test]
    fn walk_counts_on_path() {
        let g = path3();
        let ones = NodeWeights::ones(3);
        assert_eq!(walk_counts(&g, &ones, 1).unwrap().0, vec![2.0, 3.0, 2.0]);
        assert_eq!(walk_counts(&g, &ones, 2).unwrap().0, vec![5.0, 7.0, 5.0]);
        let x = NodeWeights::new(vec![0.5, 2.0, 3.0]).unwrap();
        assert_eq!(walk_counts(&g, &x, 0).unwrap().0, x.as_slice());
        assert!(walk_counts(&g, &NodeWeights::ones(2), 1).is_err());
    }

    #[test]
    fn walk_counts_ignore_edge_weights() {
        let g = Graph::build(3, [(0, 1, Some(10.0)), (1, 2, Some(0.5))]).unwrap();
        let c = walk_counts(&g, &NodeWeights::ones(3), 1).unwrap();
        assert_eq!(c.0, vec![2.0, 3.0, 2.0]);
    }

    #[test]
    fn degree_rule_on_star() {
        let g = star3();
        let w = degree_rule_scores(&g, &NodeWeights::ones(4), 1).unwrap();
        assert!(close(&w, &[0.25, 0.5, 0.5, 0.5]));
        let r = rank_by_degree_rule(&g, &NodeWeights::ones(4), 1).unwrap();
        assert_eq!(r.order(), vec![1, 2, 3, 0]);
    }

    #[test]
    fn degree_rule_regular_graph_is_id_order() {
        let c5: Vec<_> = (0..5).map(|i| (i, (i + 1) % 5)).collect();
        let g = Graph::from_pairs(5, &c5).unwrap();
        let r = rank_by_degree_rule(&g, &NodeWeights::ones(5), 2).unwrap();
        assert_eq!(r, Ranking::node_id(5));
    }

    #[test]
    fn degree_rule_weighted_path() {
        let x = NodeWeights::new(vec![9.0, 1.0, 9.0]).unwrap();
        let w = degree_rule_scores(&path3(), &x, 1).unwrap();
        assert!(close(&w, &[4.5, 1.0 / 3.0, 4.5]));
        let r = rank_by_degree_rule(&path3(), &x, 1).unwrap();
        assert_eq!(r.order(), vec![0, 2, 1]);
    }

    #[test]
    fn weight_rule_examples() {
        let w = weight_rule_scores(&path3(), &NodeWeights::ones(3), 1).unwrap();
        assert!(close(&w, &[0.5, 1.0 / 3.0, 0.5]));

        let iso = Graph::empty(2);
        let x = NodeWeights::new(vec![3.0, 0.25]).unwrap();
        assert_eq!(weight_rule_scores(&iso, &x, 4).unwrap(), vec![1.0, 1.0]);

        let x = NodeWeights::new(vec![10.0, 1.0, 1.0, 1.0]).unwrap();
        let w = weight_rule_scores(&star3(), &x, 1).unwrap();
        assert!(close(
            &w,
            &[10.0 / 13.0, 1.0 / 11.0, 1.0 / 11.0, 1.0 / 11.0]
        ));
        let r = rank_by_weight_rule(&star3(), &x, 1).unwrap();
        assert_eq!(r.order()[0], 0);
    }

    #[test]
    fn static_rankings() {
        assert_eq!(
            rank_static(&StaticRanking::NodeId, 3).unwrap().priorities(),
            &[0, 1, 2]
        );
        assert_eq!(
            rank_static(&StaticRanking::Constant, 4).unwrap(),
            Ranking::node_id(4)
        );
        let a = rank_static(&StaticRanking::Random { seed: 42 }, 50).unwrap();
        let b = rank_static(&StaticRanking::Random { seed: 42 }, 50).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, Ranking::node_id(50));

        let ext = rank_static(&StaticRanking::External(vec![0.5, 2.0, 0.5]), 3).unwrap();
        assert_eq!(ext.order(), vec![1, 0, 2]);
        assert!(matches!(
            rank_static(&StaticRanking::External(vec![1.0]), 3),
            Err(RankingError::LengthMismatch {
                expected: 3,
                got: 1
            })
        ));
    }

    #[test]
    fn priorities_must_be_distinct() {
        assert_eq!(
            Ranking::from_priorities(&[4, 9, 4]),
            Err(RankingError::NotInjective {
                value: 4,
                first: 0,
                second: 2
            })
        );
        let r = Ranking::from_priorities(&[40, 10, 30]).unwrap();
        assert_eq!(r.order(), vec![1, 2, 0]);
        assert!(Ranking::ascending(&[1.0, f64::NAN]).is_err());
    }

    #[test]
    fn permute_moves_priorities_with_nodes() {
        let r = Ranking::from_priorities(&[2, 0, 1]).unwrap();
        let p = r.permute(&[1, 2, 0]);
        assert_eq!(p.priority(1), 2);
        assert_eq!(p.priority(2), 0);
        assert_eq!(p.priority(0), 1);
    }
}
