//! Deterministic parallel greedy maximal k-independent sets.
//!
//! Each outer round finds the active nodes holding the minimum priority
//! within their k-hop neighborhood (k rounds of min-label propagation),
//! selects them, and deactivates everything within k hops of the selection
//! (k rounds of flag propagation). Inactive nodes carry [`NO_LABEL`] but still
//! relay labels, so distances are always measured in the full graph.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, GraphError};
use crate::oracle::blelloch_mis;
use crate::propagate::{min_rounds, or_rounds, NO_LABEL};
use crate::ranking::{Ranking, RankingError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KMisError {
    #[error("k must be at least 1")]
    ZeroK,
    #[error(transparent)]
    Ranking(#[from] RankingError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KMisResult {
    /// Selected centroids, ascending.
    pub selected: Vec<usize>,
    /// Outer rounds executed.
    pub rounds: usize,
    pub k: usize,
}

impl KMisResult {
    pub fn len(&self) -> usize {
        self.selected.len()
    }

    pub fn is_empty(&self) -> bool {
        self.selected.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.selected.binary_search(&v).is_ok()
    }

    pub fn mask(&self, n: usize) -> Vec<bool> {
        let mut m = vec![false; n];
        for &v in &self.selected {
            m[v] = true;
        }
        m
    }
}

pub fn k_mis(g: &Graph, k: usize, pi: &Ranking) -> Result<KMisResult, KMisError> {
    if k == 0 {
        return Err(KMisError::ZeroK);
    }
    let n = g.n();
    pi.check_len(n)?;

    let mut active = vec![true; n];
    let mut remaining = n;
    let mut selected = vec![false; n];
    let mut labels = vec![NO_LABEL; n];
    let mut label_scratch = Vec::with_capacity(n);
    let mut flags = vec![false; n];
    let mut flag_scratch = Vec::with_capacity(n);
    let mut rounds = 0;

    while remaining > 0 {
        rounds += 1;
        labels
            .par_iter_mut()
            .zip(active.par_iter())
            .enumerate()
            .for_each(|(v, (l, &a))| *l = if a { pi.priority(v) } else { NO_LABEL });
        min_rounds(g, &mut labels, &mut label_scratch, k);

        flags
            .par_iter_mut()
            .enumerate()
            .for_each(|(v, f)| *f = active[v] && labels[v] == pi.priority(v));
        selected
            .par_iter_mut()
            .zip(flags.par_iter())
            .for_each(|(s, &f)| *s |= f);

        or_rounds(g, &mut flags, &mut flag_scratch, k);
        let removed: usize = active
            .par_iter_mut()
            .zip(flags.par_iter())
            .map(|(a, &f)| {
                let hit = *a && f;
                if hit {
                    *a = false;
                }
                usize::from(hit)
            })
            .sum();
        // The active node with the smallest priority always survives its own
        // propagation, so every round removes at least one node.
        debug_assert!(removed > 0);
        remaining -= removed;
    }

    Ok(KMisResult {
        selected: (0..n).filter(|&v| selected[v]).collect(),
        rounds,
        k,
    })
}

/// Test oracle: the 1-hop greedy algorithm run on the explicit k-th power.
/// Refuses graphs with more than `cap` nodes.
pub fn k_mis_reference(
    g: &Graph,
    k: usize,
    pi: &Ranking,
    cap: usize,
) -> Result<KMisResult, KMisError> {
    if k == 0 {
        return Err(KMisError::ZeroK);
    }
    pi.check_len(g.n())?;
    let gk = g.power(k, cap)?;
    let (selected, rounds) = blelloch_mis(&gk, pi);
    Ok(KMisResult {
        selected,
        rounds,
        k,
    })
}
