//! Structural checks on k-MIS selections and coarsened graphs.
//!
//! Checks never fail early: every violation is collected with its witness
//! nodes so a complete report is always produced.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coarsen::CoarsenedGraph;
use crate::graph::{Graph, UNREACHABLE};

/// Above this many nodes, distortion is checked on sampled pairs.
pub const EXHAUSTIVE_LIMIT: usize = 500;
pub const DEFAULT_SAMPLE_PAIRS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Violation {
    /// Two selected nodes within `k` hops.
    NotIndependent {
        u: usize,
        v: usize,
        dist: usize,
    },
    /// Node farther than `k` hops from every selected node.
    Uncovered {
        node: usize,
    },
    /// Coarse edge between centroids at distance outside `[k+1, 2k+1]`;
    /// `dist` is `None` when it exceeds the search depth.
    CoarseEdgeDistance {
        a: usize,
        b: usize,
        dist: Option<usize>,
    },
    /// `l_H(rho(u), rho(v)) > l_G(u, v)`.
    DistortionLower {
        u: usize,
        v: usize,
        dist_g: usize,
        dist_h: usize,
    },
    /// `l_G(u, v) > (2k + 1) l_H(rho(u), rho(v)) + 2k`.
    DistortionUpper {
        u: usize,
        v: usize,
        dist_g: usize,
        dist_h: usize,
    },
    /// Connected in `G` but not in `H`.
    Disconnected {
        u: usize,
        v: usize,
        dist_g: usize,
    },
    /// `rho(v)` is not a node of the coarse graph.
    BadAssignment {
        node: usize,
        target: usize,
    },
    ComponentCount {
        original: usize,
        coarse: usize,
    },
    /// One component of `G` maps into several components of `H`.
    ComponentSplit {
        component: usize,
        witness: usize,
    },
    /// Two components of `G` map into the same component of `H`.
    ComponentMerge {
        first: usize,
        second: usize,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct KMisValidity {
    pub selected: usize,
    pub violations: Vec<Violation>,
}

impl KMisValidity {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Pairwise distance `> k` between selected nodes, and every node within
/// `k` hops of one of them.
pub fn check_kmis_validity(g: &Graph, k: usize, selected: &[usize]) -> KMisValidity {
    let n = g.n();
    let mut is_sel = vec![false; n];
    for &s in selected {
        is_sel[s] = true;
    }
    let mut violations: Vec<Violation> = selected
        .par_iter()
        .map(|&s| {
            g.ball(s, k)
                .into_iter()
                .filter(|&(v, d)| d > 0 && is_sel[v] && s < v)
                .map(|(v, dist)| Violation::NotIndependent { u: s, v, dist })
                .collect::<Vec<_>>()
        })
        .flatten()
        .collect();
    violations.sort_by_key(|v| match v {
        Violation::NotIndependent { u, v, .. } => (*u, *v),
        _ => unreachable!(),
    });

    let mut dist = vec![UNREACHABLE; n];
    let mut queue = std::collections::VecDeque::new();
    for &s in selected {
        dist[s] = 0;
        queue.push_back(s);
    }
    while let Some(u) = queue.pop_front() {
        if dist[u] >= k {
            continue;
        }
        for &v in g.neighbors(u) {
            if dist[v] == UNREACHABLE {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    violations.extend(
        (0..n)
            .filter(|&v| dist[v] == UNREACHABLE)
            .map(|node| Violation::Uncovered { node }),
    );
    KMisValidity {
        selected: selected.len(),
        violations,
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeBoundReport {
    /// `(a, b, l_G(a, b))` per coarse edge, as original centroid ids.
    pub per_coarse_edge: Vec<(usize, usize, Option<usize>)>,
    /// Count of coarse edges per realized distance.
    pub histogram: BTreeMap<usize, usize>,
    pub violations: Vec<Violation>,
}

/// Every coarse edge must join centroids at distance in `[k+1, 2k+1]` of `g`.
pub fn check_edge_bounds(g: &Graph, h: &CoarsenedGraph, k: usize) -> EdgeBoundReport {
    let cents = h.centroids();
    let limit = 2 * k + 2;
    let per_source: Vec<Vec<(usize, usize, Option<usize>)>> = (0..h.graph.n())
        .into_par_iter()
        .map(|ia| {
            let partners: Vec<usize> = h
                .graph
                .neighbors(ia)
                .iter()
                .copied()
                .filter(|&ib| ia < ib)
                .collect();
            if partners.is_empty() {
                return Vec::new();
            }
            let a = cents[ia];
            let ball: std::collections::HashMap<usize, usize> =
                g.ball(a, limit).into_iter().collect();
            partners
                .into_iter()
                .map(|ib| {
                    let b = cents[ib];
                    (a, b, ball.get(&b).copied())
                })
                .collect()
        })
        .collect();

    let mut report = EdgeBoundReport::default();
    for (a, b, dist) in per_source.into_iter().flatten() {
        if let Some(d) = dist {
            *report.histogram.entry(d).or_default() += 1;
        }
        let ok = matches!(dist, Some(d) if k < d && d <= 2 * k + 1);
        if !ok {
            report
                .violations
                .push(Violation::CoarseEdgeDistance { a, b, dist });
        }
        report.per_coarse_edge.push((a, b, dist));
    }
    report
}

/// Which node pairs to test for distortion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PairSelection {
    /// All unordered pairs.
    Exhaustive,
    /// `count` uniformly drawn pairs.
    Sampled { count: usize, seed: u64 },
    /// Exhaustive up to [`EXHAUSTIVE_LIMIT`] nodes, sampled above.
    Auto { count: usize, seed: u64 },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistortionReport {
    /// `(u, v, l_G(u, v), l_H(rho(u), rho(v)))` for every checked pair.
    pub per_pair: Vec<(usize, usize, usize, usize)>,
    /// Pairs skipped because they lie in different components of `g`.
    pub skipped_disconnected: usize,
    pub violations: Vec<Violation>,
}

/// Coarse index per node under `rho`, collecting invalid targets.
fn coarse_assignment(h: &CoarsenedGraph, rho: &[usize]) -> (Vec<Option<usize>>, Vec<Violation>) {
    let mut bad = Vec::new();
    let idx = rho
        .iter()
        .enumerate()
        .map(|(node, &target)| {
            let i = h.index_of(target);
            if i.is_none() {
                bad.push(Violation::BadAssignment { node, target });
            }
            i
        })
        .collect();
    (idx, bad)
}

/// Checked pairs, violations and skipped pairs from one BFS source.
type SourceRows = (Vec<(usize, usize, usize, usize)>, Vec<Violation>, usize);

/// `l_H(rho(u), rho(v)) <= l_G(u, v) <= (2k+1) l_H(rho(u), rho(v)) + 2k`
/// per pair. Pairs in different components of `g` are skipped.
pub fn check_distortion(
    g: &Graph,
    h: &CoarsenedGraph,
    rho: &[usize],
    k: usize,
    pairs: PairSelection,
) -> DistortionReport {
    let n = g.n();
    let (coarse, mut violations) = coarse_assignment(h, rho);
    let selection = match pairs {
        PairSelection::Auto { count, seed } if n > EXHAUSTIVE_LIMIT => {
            PairSelection::Sampled { count, seed }
        }
        PairSelection::Auto { .. } => PairSelection::Exhaustive,
        other => other,
    };

    // Sources with the partners to test from each.
    let jobs: Vec<(usize, Vec<usize>)> = match selection {
        PairSelection::Sampled { count, seed } if n > 0 => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut by_source: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
            for _ in 0..count {
                let u = rng.gen_range(0..n);
                let v = rng.gen_range(0..n);
                by_source.entry(u).or_default().push(v);
            }
            by_source.into_iter().collect()
        }
        PairSelection::Sampled { .. } => Vec::new(),
        _ => (0..n).map(|u| (u, (u..n).collect())).collect(),
    };

    // Coarse distances are needed from every coarse node touched by a source.
    let rows: Vec<SourceRows> = jobs
        .into_par_iter()
        .map(|(u, partners)| {
            let mut checked = Vec::new();
            let mut bad = Vec::new();
            let mut skipped = 0;
            let Some(cu) = coarse[u] else {
                return (checked, bad, skipped);
            };
            let dg = g.bfs(u).expect("source in range").dist;
            let dh = h.graph.bfs(cu).expect("coarse source in range").dist;
            for v in partners {
                let Some(cv) = coarse[v] else { continue };
                let (lg, lh) = (dg[v], dh[cv]);
                if lg == UNREACHABLE {
                    skipped += 1;
                    continue;
                }
                if lh == UNREACHABLE {
                    bad.push(Violation::Disconnected { u, v, dist_g: lg });
                    continue;
                }
                if lh > lg {
                    bad.push(Violation::DistortionLower {
                        u,
                        v,
                        dist_g: lg,
                        dist_h: lh,
                    });
                }
                if lg > (2 * k + 1) * lh + 2 * k {
                    bad.push(Violation::DistortionUpper {
                        u,
                        v,
                        dist_g: lg,
                        dist_h: lh,
                    });
                }
                checked.push((u, v, lg, lh));
            }
            (checked, bad, skipped)
        })
        .collect();

    let mut report = DistortionReport::default();
    for (checked, bad, skipped) in rows {
        report.per_pair.extend(checked);
        violations.extend(bad);
        report.skipped_disconnected += skipped;
    }
    report.violations = violations;
    report
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentReport {
    pub original: usize,
    pub coarse: usize,
    pub violations: Vec<Violation>,
}

impl ComponentReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Component counts must match, and `rho` must map each component of `g`
/// onto exactly one component of `h`, injectively.
pub fn check_components(g: &Graph, h: &CoarsenedGraph, rho: &[usize]) -> ComponentReport {
    let (gc, gcomp) = g.connected_components();
    let (hc, hcomp) = h.graph.connected_components();
    let (coarse, mut violations) = coarse_assignment(h, rho);
    if gc != hc {
        violations.push(Violation::ComponentCount {
            original: gc,
            coarse: hc,
        });
    }
    let mut image: Vec<Option<usize>> = vec![None; gc];
    for v in 0..g.n() {
        let Some(cv) = coarse[v] else { continue };
        let target = hcomp[cv];
        match image[gcomp[v]] {
            None => image[gcomp[v]] = Some(target),
            Some(t) if t != target => violations.push(Violation::ComponentSplit {
                component: gcomp[v],
                witness: v,
            }),
            Some(_) => {}
        }
    }
    let mut owner: Vec<Option<usize>> = vec![None; hc];
    for (comp, target) in image.iter().enumerate() {
        if let Some(t) = *target {
            match owner[t] {
                None => owner[t] = Some(comp),
                Some(first) => violations.push(Violation::ComponentMerge {
                    first,
                    second: comp,
                }),
            }
        }
    }
    ComponentReport {
        original: gc,
        coarse: hc,
        violations,
    }
}

/// Every check on one coarsening run.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub k: usize,
    pub kmis: KMisValidity,
    pub edge_bounds: EdgeBoundReport,
    pub distortion: DistortionReport,
    pub components: ComponentReport,
}

impl VerificationReport {
    pub fn violations(&self) -> impl Iterator<Item = &Violation> {
        self.kmis
            .violations
            .iter()
            .chain(&self.edge_bounds.violations)
            .chain(&self.distortion.violations)
            .chain(&self.components.violations)
    }

    pub fn passed(&self) -> bool {
        self.violations().next().is_none()
    }

    /// CSV sections separated by `# section` lines.
    pub fn to_csv(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        let status = |ok: bool| if ok { "pass" } else { "fail" };
        let _ = writeln!(out, "# summary");
        let _ = writeln!(out, "check,status,violations");
        let sections = [
            ("kmis", self.kmis.violations.len()),
            ("edge_bounds", self.edge_bounds.violations.len()),
            ("distortion", self.distortion.violations.len()),
            ("components", self.components.violations.len()),
        ];
        for (name, count) in sections {
            let _ = writeln!(out, "{name},{},{count}", status(count == 0));
        }
        let _ = writeln!(out, "# edge_distance_histogram");
        let _ = writeln!(out, "distance,count");
        for (d, c) in &self.edge_bounds.histogram {
            let _ = writeln!(out, "{d},{c}");
        }
        let _ = writeln!(out, "# components");
        let _ = writeln!(out, "original,coarse");
        let _ = writeln!(
            out,
            "{},{}",
            self.components.original, self.components.coarse
        );
        let _ = writeln!(out, "# distortion");
        let _ = writeln!(out, "pairs_checked,pairs_skipped_disconnected");
        let _ = writeln!(
            out,
            "{},{}",
            self.distortion.per_pair.len(),
            self.distortion.skipped_disconnected
        );
        let _ = writeln!(out, "# violations");
        let _ = writeln!(out, "kind,witness");
        for v in self.violations() {
            let _ = writeln!(out, "{}", violation_csv(v));
        }
        out
    }
}

fn violation_csv(v: &Violation) -> String {
    match v {
        Violation::NotIndependent { u, v, dist } => format!("not_independent,{u} {v} dist={dist}"),
        Violation::Uncovered { node } => format!("uncovered,{node}"),
        Violation::CoarseEdgeDistance { a, b, dist } => match dist {
            Some(d) => format!("coarse_edge_distance,{a} {b} dist={d}"),
            None => format!("coarse_edge_distance,{a} {b} dist=far"),
        },
        Violation::DistortionLower {
            u,
            v,
            dist_g,
            dist_h,
        } => {
            format!("distortion_lower,{u} {v} lg={dist_g} lh={dist_h}")
        }
        Violation::DistortionUpper {
            u,
            v,
            dist_g,
            dist_h,
        } => {
            format!("distortion_upper,{u} {v} lg={dist_g} lh={dist_h}")
        }
        Violation::Disconnected { u, v, dist_g } => format!("disconnected,{u} {v} lg={dist_g}"),
        Violation::BadAssignment { node, target } => format!("bad_assignment,{node}->{target}"),
        Violation::ComponentCount { original, coarse } => {
            format!("component_count,{original} vs {coarse}")
        }
        Violation::ComponentSplit { component, witness } => {
            format!("component_split,{component} at {witness}")
        }
        Violation::ComponentMerge { first, second } => format!("component_merge,{first} {second}"),
    }
}

/// Runs all four checks. `rho` defaults to the coarsening's own assignment.
pub fn verify_all(
    g: &Graph,
    h: &CoarsenedGraph,
    k: usize,
    rho: Option<&[usize]>,
    pairs: PairSelection,
) -> VerificationReport {
    let rho = rho.unwrap_or(&h.partition.assignment);
    VerificationReport {
        k,
        kmis: check_kmis_validity(g, k, h.centroids()),
        edge_bounds: check_edge_bounds(g, h, k),
        distortion: check_distortion(g, h, rho, k, pairs),
        components: check_components(g, h, rho),
    }
}
