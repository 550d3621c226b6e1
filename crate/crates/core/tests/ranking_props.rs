#![allow(clippy::needless_range_loop)]

use kcoarse::generators;
use kcoarse::graph::{Graph, NodeWeights};
use kcoarse::ranking::{
    rank_by_degree_rule, rank_by_weight_rule, rank_static, walk_counts, Ranking, StaticRanking,
};
use proptest::prelude::*;

fn arb_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (
        1..=max_n,
        prop::sample::select(vec![0.05, 0.2, 0.5]),
        any::<u64>(),
    )
        .prop_map(|(n, p, seed)| generators::gnp(n, p, seed))
}

fn arb_weighted(max_n: usize) -> impl Strategy<Value = (Graph, NodeWeights)> {
    arb_graph(max_n).prop_flat_map(|g| {
        let n = g.n();
        (Just(g), prop::collection::vec(0.01f64..100.0, n))
            .prop_map(|(g, x)| (g, NodeWeights::new(x).unwrap()))
    })
}

fn injective(r: &Ranking) -> bool {
    let mut seen = vec![false; r.len()];
    r.priorities()
        .iter()
        .all(|&p| p < seen.len() && !std::mem::replace(&mut seen[p], true))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn walk_counts_dominate_k_hop_sums((g, x) in arb_weighted(50), k in 0usize..5) {
        let c = walk_counts(&g, &x, k).unwrap();
        for v in 0..g.n() {
            let exact: f64 = g.ball(v, k).iter().map(|&(u, _)| x[u]).sum();
            prop_assert!(c.0[v] >= exact * (1.0 - 1e-12));
            prop_assert!(c.0[v] >= x[v]);
        }
    }

    #[test]
    fn walk_counts_k1_is_closed_neighborhood_sum((g, x) in arb_weighted(50)) {
        let c = walk_counts(&g, &x, 1).unwrap();
        for v in 0..g.n() {
            let direct = x[v] + g.neighbors(v).iter().map(|&u| x[u]).sum::<f64>();
            prop_assert_eq!(c.0[v], direct);
        }
    }

    #[test]
    fn walk_counts_monotone_in_k((g, x) in arb_weighted(40), k in 0usize..6) {
        let a = walk_counts(&g, &x, k).unwrap();
        let b = walk_counts(&g, &x, k + 1).unwrap();
        prop_assert!(a.0.iter().zip(&b.0).all(|(p, q)| q >= p));
    }

    #[test]
    fn rankings_are_injective((g, x) in arb_weighted(50), k in 1usize..4, seed: u64) {
        prop_assert!(injective(&rank_by_degree_rule(&g, &x, k).unwrap()));
        prop_assert!(injective(&rank_by_weight_rule(&g, &x, k).unwrap()));
        let random = StaticRanking::Random { seed };
        prop_assert!(injective(&rank_static(&random, g.n()).unwrap()));
        let ext = StaticRanking::External(x.as_slice().iter().map(|w| w.floor()).collect());
        prop_assert!(injective(&rank_static(&ext, g.n()).unwrap()));
    }

    #[test]
    fn rule_rankings_relabel_with_the_graph(
        (g, x) in arb_weighted(40),
        k in 1usize..4,
        seed: u64,
    ) {
        let perm = generators::permutation(g.n(), seed);
        let pg = g.permute(&perm).unwrap();
        let mut px = vec![0.0; g.n()];
        for v in 0..g.n() {
            px[perm[v]] = x[v];
        }
        let px = NodeWeights::new(px).unwrap();

        // Scores are equivariant; any two nodes with clearly different scores
        // keep their relative order after relabeling.
        let a = kcoarse::ranking::weight_rule_scores(&g, &x, k).unwrap();
        let b = kcoarse::ranking::weight_rule_scores(&pg, &px, k).unwrap();
        for v in 0..g.n() {
            prop_assert!((a[v] - b[perm[v]]).abs() <= 1e-12 * a[v].abs());
        }
        let ra = rank_by_weight_rule(&g, &x, k).unwrap();
        let rb = rank_by_weight_rule(&pg, &px, k).unwrap();
        for u in 0..g.n() {
            for v in 0..g.n() {
                if (a[u] - a[v]).abs() > 1e-9 * a[u].abs().max(a[v].abs()) {
                    let before = ra.priority(u) < ra.priority(v);
                    prop_assert_eq!(before, rb.priority(perm[u]) < rb.priority(perm[v]));
                }
            }
        }
    }
}

#[test]
fn external_scores_relabel_with_nodes() {
    let scores = vec![3.0, 1.0, 4.0, 1.0, 5.0, 9.0, 2.0, 6.0];
    let n = scores.len();
    let perm = generators::permutation(n, 5);
    let mut moved = vec![0.0; n];
    for (&p, &score) in perm.iter().zip(&scores) {
        moved[p] = score;
    }
    let a = rank_static(&StaticRanking::External(scores), n).unwrap();
    let b = rank_static(&StaticRanking::External(moved), n).unwrap();
    // The two tied nodes (1 and 3) keep their relative order only when the
    // permutation preserves it; every other position must match.
    for v in 0..n {
        if v != 1 && v != 3 {
            assert_eq!(a.priority(v), b.priority(perm[v]));
        }
    }
}
