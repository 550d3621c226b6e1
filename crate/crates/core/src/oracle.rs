//! Reference algorithms for checking selection quality.
//!
//! - [`blelloch_mis`]: round-synchronous greedy MIS on an explicit graph.
//! - [`sequential_greedy_mwis`]: classic one-node-at-a-time greedy with
//!   scores recomputed on the surviving subgraph.
//! - [`exact_mwis`]: branch and bound, tiny graphs only.
//! - [`compare`]: averaged weight comparison plus the lower-bound checks.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, GraphError, NodeWeights};
use crate::kmis::{k_mis, KMisError};
use crate::ranking::{
    rank_by_degree_rule, rank_by_weight_rule, walk_counts, Ranking, RankingError,
};

/// Largest graph accepted by [`exact_mwis`].
pub const EXACT_CAP: usize = 24;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("exact search is limited to {cap} nodes, got {n}")]
    TooLarge { n: usize, cap: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    KMis(#[from] KMisError),
    #[error(transparent)]
    Ranking(#[from] RankingError),
}

/// Greedy node-selection rule used to score candidates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Rule {
    /// `x_v / (deg(v) + 1)`, or its k-walk generalization.
    Degree,
    /// `x_v / sum of x over N[v]`, or its k-walk generalization.
    Weight,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::Degree => "degree",
            Rule::Weight => "weight",
        }
    }

    pub fn rank(self, g: &Graph, x: &NodeWeights, k: usize) -> Result<Ranking, RankingError> {
        match self {
            Rule::Degree => rank_by_degree_rule(g, x, k),
            Rule::Weight => rank_by_weight_rule(g, x, k),
        }
    }
}

/// Round-synchronous greedy MIS: every round selects the active nodes whose
/// priority beats all active neighbors, then removes their closed
/// neighborhoods. Returns the selection (ascending) and the rounds taken.
pub fn blelloch_mis(g: &Graph, pi: &Ranking) -> (Vec<usize>, usize) {
    let n = g.n();
    let mut active = vec![true; n];
    let mut selected = vec![false; n];
    let mut remaining = n;
    let mut rounds = 0;
    while remaining > 0 {
        rounds += 1;
        let winners: Vec<usize> = (0..n)
            .filter(|&v| {
                active[v]
                    && g.neighbors(v)
                        .iter()
                        .all(|&u| !active[u] || pi.priority(v) < pi.priority(u))
            })
            .collect();
        for &v in &winners {
            selected[v] = true;
        }
        for &v in &winners {
            for u in std::iter::once(v).chain(g.neighbors(v).iter().copied()) {
                if active[u] {
                    active[u] = false;
                    remaining -= 1;
                }
            }
        }
    }
    ((0..n).filter(|&v| selected[v]).collect(), rounds)
}

#[derive(Clone, Copy)]
struct Candidate {
    score: f64,
    node: usize,
    stamp: u32,
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Candidate {}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Candidate {
    // Max-heap: larger score first, then smaller node id.
    fn cmp(&self, other: &Self) -> Ordering {
        self.score
            .total_cmp(&other.score)
            .then(other.node.cmp(&self.node))
    }
}

/// Sequential greedy on `gk`: repeatedly take the node maximizing the rule
/// score on the surviving subgraph (ties to the smaller id) and delete its
/// closed neighborhood. Returns an independent set of `gk`, ascending.
pub fn sequential_greedy_mwis(gk: &Graph, x: &NodeWeights, rule: Rule) -> Vec<usize> {
    let n = gk.n();
    let mut alive = vec![true; n];
    let mut stamp = vec![0u32; n];
    // Surviving closed-neighborhood degree or weight, per rule.
    let mut mass: Vec<f64> = (0..n)
        .map(|v| match rule {
            Rule::Degree => (gk.degree(v) + 1) as f64,
            Rule::Weight => x[v] + gk.neighbors(v).iter().map(|&u| x[u]).sum::<f64>(),
        })
        .collect();
    let mut heap: BinaryHeap<Candidate> = (0..n)
        .map(|v| Candidate {
            score: x[v] / mass[v],
            node: v,
            stamp: 0,
        })
        .collect();
    let mut chosen = Vec::new();
    while let Some(c) = heap.pop() {
        if !alive[c.node] || c.stamp != stamp[c.node] {
            continue;
        }
        chosen.push(c.node);
        let mut removed = vec![c.node];
        alive[c.node] = false;
        for &u in gk.neighbors(c.node) {
            if alive[u] {
                alive[u] = false;
                removed.push(u);
            }
        }
        for &r in &removed {
            let delta = match rule {
                Rule::Degree => 1.0,
                Rule::Weight => x[r],
            };
            for &z in gk.neighbors(r) {
                if alive[z] {
                    mass[z] -= delta;
                    stamp[z] += 1;
                    heap.push(Candidate {
                        score: x[z] / mass[z],
                        node: z,
                        stamp: stamp[z],
                    });
                }
            }
        }
    }
    chosen.sort_unstable();
    chosen
}

/// Maximum-weight independent set by exhaustive branch and bound.
/// Returns the set (ascending) and its weight.
pub fn exact_mwis(g: &Graph, x: &NodeWeights) -> Result<(Vec<usize>, f64), OracleError> {
    let n = g.n();
    if n > EXACT_CAP {
        return Err(OracleError::TooLarge { n, cap: EXACT_CAP });
    }
    x.check_len(n)?;
    let nbr: Vec<u32> = (0..n)
        .map(|v| g.neighbors(v).iter().fold(0u32, |m, &u| m | (1 << u)))
        .collect();

    struct Search<'a> {
        nbr: &'a [u32],
        x: &'a [f64],
        best: f64,
        best_set: u32,
    }

    impl Search<'_> {
        fn run(&mut self, cand: u32, weight: f64, chosen: u32) {
            if cand == 0 {
                if weight > self.best {
                    self.best = weight;
                    self.best_set = chosen;
                }
                return;
            }
            let mut bound = weight;
            let mut rest = cand;
            while rest != 0 {
                bound += self.x[rest.trailing_zeros() as usize];
                rest &= rest - 1;
            }
            if bound <= self.best {
                return;
            }
            let v = cand.trailing_zeros() as usize;
            let bit = 1u32 << v;
            self.run(cand & !bit & !self.nbr[v], weight + self.x[v], chosen | bit);
            // Skipping v only pays off when a neighbor could take its place.
            if cand & self.nbr[v] != 0 {
                self.run(cand & !bit, weight, chosen);
            }
        }
    }

    let mut s = Search {
        nbr: &nbr,
        x: x.as_slice(),
        best: 0.0,
        best_set: 0,
    };
    let all = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    s.run(all, 0.0, 0);
    let set = (0..n).filter(|&v| s.best_set & (1 << v) != 0).collect();
    Ok((set, s.best))
}

/// `lhs >= rhs` up to floating-point rounding in the sums.
pub fn at_least(lhs: f64, rhs: f64) -> bool {
    lhs >= rhs - 1e-9 * rhs.abs().max(1.0)
}

/// Right-hand side of the walk-count lower bound for `rule`:
/// `sum_v w(v)` for the degree rule, `sum_v w(v) x_v` for the weight rule.
pub fn lower_bound(g: &Graph, x: &NodeWeights, k: usize, rule: Rule) -> Result<f64, GraphError> {
    let xs = x.as_slice();
    Ok(match rule {
        Rule::Degree => {
            let c = walk_counts(g, &NodeWeights::ones(g.n()), k)?;
            xs.iter().zip(&c.0).map(|(a, b)| a / b).sum()
        }
        Rule::Weight => {
            let c = walk_counts(g, x, k)?;
            xs.iter().zip(&c.0).map(|(a, b)| a * a / b).sum()
        }
    })
}

/// `max_v [(A + I)^k 1]_v`.
pub fn delta_k(g: &Graph, k: usize) -> f64 {
    walk_counts(g, &NodeWeights::ones(g.n()), k)
        .expect("ones vector matches")
        .0
        .into_iter()
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareConfig {
    pub trials: usize,
    pub weight_lo: f64,
    pub weight_hi: f64,
    /// Trial `t` draws its weights with seed `seed + t`.
    pub seed: u64,
    pub power_cap: usize,
}

impl Default for CompareConfig {
    fn default() -> Self {
        CompareConfig {
            trials: 10,
            weight_lo: 1.0,
            weight_hi: 100.0,
            seed: 0,
            power_cap: crate::graph::DEFAULT_POWER_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRow {
    pub trial: usize,
    pub seed: u64,
    pub greedy_weight: f64,
    pub ours_weight: f64,
    /// Lower bound the selection must meet for this rule.
    pub bound_rhs: f64,
    /// `alpha / delta_k`, when the exact optimum was computed.
    pub ratio_rhs: Option<f64>,
    pub exact_alpha: Option<f64>,
}

impl TrialRow {
    pub fn bound_holds(&self) -> bool {
        at_least(self.ours_weight, self.bound_rhs)
    }

    pub fn ratio_holds(&self) -> bool {
        self.ratio_rhs.is_none_or(|r| at_least(self.ours_weight, r))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub k: usize,
    pub rule: Rule,
    pub delta_k: f64,
    pub trials: Vec<TrialRow>,
    /// Means over trials.
    pub greedy_weight: f64,
    pub ours_weight: f64,
    pub exact_alpha: Option<f64>,
}

impl OracleReport {
    pub fn violations(&self) -> usize {
        self.trials
            .iter()
            .filter(|t| !t.bound_holds() || !t.ratio_holds())
            .count()
    }

    pub const CSV_HEADER: &'static str =
        "graph,k,rule,trial,greedy_weight,ours_weight,bound_rhs,ratio_rhs";

    pub fn csv_rows(&self, graph: &str) -> Vec<String> {
        self.trials
            .iter()
            .map(|t| {
                format!(
                    "{graph},{},{},{},{},{},{},{}",
                    self.k,
                    self.rule.name(),
                    t.trial,
                    t.greedy_weight,
                    t.ours_weight,
                    t.bound_rhs,
                    t.ratio_rhs.map(|r| r.to_string()).unwrap_or_default()
                )
            })
            .collect()
    }
}

/// Weight comparison between the sequential greedy on the explicit `G^k`
/// (1-hop rule) and the k-walk ranking fed to [`k_mis`] on `g`.
///
/// Each trial draws fresh uniform weights. When `G^k` is small enough for
/// [`exact_mwis`] the optimum is also computed for the ratio check.
pub fn compare(
    g: &Graph,
    k: usize,
    rule: Rule,
    cfg: &CompareConfig,
) -> Result<OracleReport, OracleError> {
    let gk = g.power(k, cfg.power_cap)?;
    let dk = delta_k(g, k);
    let trials: Vec<TrialRow> = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| -> Result<TrialRow, OracleError> {
            let seed = cfg.seed.wrapping_add(trial as u64);
            let x = NodeWeights::uniform(g.n(), cfg.weight_lo, cfg.weight_hi, seed)?;
            let greedy = sequential_greedy_mwis(&gk, &x, rule);
            let pi = rule.rank(g, &x, k)?;
            let ours = k_mis(g, k, &pi)?;
            let exact_alpha = if gk.n() <= EXACT_CAP {
                Some(exact_mwis(&gk, &x)?.1)
            } else {
                None
            };
            Ok(TrialRow {
                trial,
                seed,
                greedy_weight: x.total(&greedy),
                ours_weight: x.total(&ours.selected),
                bound_rhs: lower_bound(g, &x, k, rule)?,
                ratio_rhs: exact_alpha.map(|a| a / dk),
                exact_alpha,
            })
        })
        .collect::<Result<_, _>>()?;

    let count = trials.len().max(1) as f64;
    let mean = |f: &dyn Fn(&TrialRow) -> f64| trials.iter().map(f).sum::<f64>() / count;
    let exact_alpha = trials
        .iter()
        .map(|t| t.exact_alpha)
        .collect::<Option<Vec<f64>>>()
        .filter(|v| !v.is_empty())
        .map(|v| v.iter().sum::<f64>() / count);
    Ok(OracleReport {
        k,
        rule,
        delta_k: dk,
        greedy_weight: mean(&|t| t.greedy_weight),
        ours_weight: mean(&|t| t.ours_weight),
        exact_alpha,
        trials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;

    fn brute_force_alpha(g: &Graph, x: &[f64]) -> f64 {
        let n = g.n();
        (0u32..1 << n)
            .filter(|&s| {
                g.edges()
                    .all(|(u, v, _)| s & (1 << u) == 0 || s & (1 << v) == 0)
            })
            .map(|s| {
                (0..n)
                    .filter(|&v| s & (1 << v) != 0)
                    .map(|v| x[v])
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn greedy_on_star_takes_leaves() {
        let g = generators::star(3);
        let s = sequential_greedy_mwis(&g, &NodeWeights::ones(4), Rule::Degree);
        assert_eq!(s, vec![1, 2, 3]);
    }

    #[test]
    fn greedy_single_node() {
        let s = sequential_greedy_mwis(&Graph::empty(1), &NodeWeights::ones(1), Rule::Weight);
        assert_eq!(s, vec![0]);
    }

    #[test]
    fn greedy_on_clique_takes_heaviest() {
        let x = NodeWeights::new(vec![5.0, 1.0, 1.0, 1.0]).unwrap();
        let g = generators::complete(4);
        for rule in [Rule::Degree, Rule::Weight] {
            let s = sequential_greedy_mwis(&g, &x, rule);
            assert_eq!(s, vec![0]);
            assert_eq!(x.total(&s), 5.0);
        }
    }

    #[test]
    fn greedy_recomputes_on_survivors() {
        // Path 0-1-2-3-4 with a heavy middle: after picking 2, nodes 0 and 4
        // remain and must both be taken.
        let x = NodeWeights::new(vec![1.0, 1.0, 10.0, 1.0, 1.0]).unwrap();
        let s = sequential_greedy_mwis(&generators::path(5), &x, Rule::Weight);
        assert_eq!(s, vec![0, 2, 4]);
    }

    #[test]
    fn exact_examples() {
        let x = NodeWeights::new(vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(exact_mwis(&Graph::empty(3), &x).unwrap().1, 6.0);

        let edge = Graph::from_pairs(2, &[(0, 1)]).unwrap();
        let x = NodeWeights::new(vec![2.0, 3.0]).unwrap();
        assert_eq!(exact_mwis(&edge, &x).unwrap(), (vec![1], 3.0));

        let c5 = generators::cycle(5);
        let alpha = brute_force_alpha(&c5, &[1.0; 5]);
        assert_eq!(alpha, 2.0);
        assert_eq!(exact_mwis(&c5, &NodeWeights::ones(5)).unwrap().1, alpha);

        assert!(matches!(
            exact_mwis(&generators::path(25), &NodeWeights::ones(25)),
            Err(OracleError::TooLarge { n: 25, cap: 24 })
        ));
    }

    #[test]
    fn exact_matches_brute_force_on_random_graphs() {
        for seed in 0..30 {
            let n = 6 + (seed as usize % 9);
            let g = generators::gnp(n, 0.3, seed);
            let x = NodeWeights::uniform(n, 1.0, 100.0, seed + 100).unwrap();
            let (set, alpha) = exact_mwis(&g, &x).unwrap();
            assert_eq!(alpha, brute_force_alpha(&g, x.as_slice()));
            assert!(set.iter().all(|&u| set.iter().all(|&v| !g.has_edge(u, v))));
            assert!((x.total(&set) - alpha).abs() < 1e-9);
        }
    }

    #[test]
    fn blelloch_is_sequential_greedy_in_rank_order() {
        for seed in 0..20 {
            let g = generators::gnp(30, 0.15, seed);
            let pi =
                crate::ranking::rank_static(&crate::ranking::StaticRanking::Random { seed }, 30)
                    .unwrap();
            let mut taken = [false; 30];
            let mut blocked = [false; 30];
            for v in pi.order() {
                if !blocked[v] {
                    taken[v] = true;
                    blocked[v] = true;
                    for &u in g.neighbors(v) {
                        blocked[u] = true;
                    }
                }
            }
            let expected: Vec<usize> = (0..30).filter(|&v| taken[v]).collect();
            assert_eq!(blelloch_mis(&g, &pi).0, expected);
        }
    }

    #[test]
    fn compare_on_small_graph() {
        let g = generators::gnp(14, 0.25, 3);
        let cfg = CompareConfig {
            trials: 4,
            seed: 11,
            ..CompareConfig::default()
        };
        for rule in [Rule::Degree, Rule::Weight] {
            let rep = compare(&g, 2, rule, &cfg).unwrap();
            assert_eq!(rep.trials.len(), 4);
            assert_eq!(rep.violations(), 0);
            let alpha = rep.exact_alpha.unwrap();
            assert!(alpha >= rep.greedy_weight.max(rep.ours_weight) - 1e-9);
            assert_eq!(rep.trials[2].seed, 13);
            assert_eq!(rep.csv_rows("toy").len(), 4);
            assert_eq!(rep, compare(&g, 2, rule, &cfg).unwrap());
        }
    }
}
