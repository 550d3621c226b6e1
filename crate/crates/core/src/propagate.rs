//! Double-buffered label propagation rounds.
//!
//! Each round reads the previous buffer and writes the next one, one node per
//! task, so the result never depends on how rayon schedules the work.

use rayon::prelude::*;

use crate::graph::Graph;

/// Label carried by nodes that hold no candidate.
pub const NO_LABEL: usize = usize::MAX;

/// Runs up to `rounds` rounds of `label(v) <- min over N[v]`. Stops early once
/// a round leaves every label unchanged. Returns the rounds executed.
pub fn min_rounds(
    g: &Graph,
    labels: &mut Vec<usize>,
    scratch: &mut Vec<usize>,
    rounds: usize,
) -> usize {
    scratch.resize(labels.len(), NO_LABEL);
    for done in 0..rounds {
        let cur: &[usize] = labels;
        let changed = scratch
            .par_iter_mut()
            .enumerate()
            .map(|(v, out)| {
                let best = g
                    .neighbors(v)
                    .iter()
                    .map(|&u| cur[u])
                    .fold(cur[v], usize::min);
                *out = best;
                best != cur[v]
            })
            .reduce(|| false, |a, b| a | b);
        std::mem::swap(labels, scratch);
        if !changed {
            return done + 1;
        }
    }
    rounds
}

/// Runs up to `rounds` rounds of `flag(v) <- any over N[v]`, with the same
/// early exit as [`min_rounds`].
pub fn or_rounds(
    g: &Graph,
    flags: &mut Vec<bool>,
    scratch: &mut Vec<bool>,
    rounds: usize,
) -> usize {
    scratch.resize(flags.len(), false);
    for done in 0..rounds {
        let cur: &[bool] = flags;
        let changed = scratch
            .par_iter_mut()
            .enumerate()
            .map(|(v, out)| {
                let hit = cur[v] || g.neighbors(v).iter().any(|&u| cur[u]);
                *out = hit;
                hit != cur[v]
            })
            .reduce(|| false, |a, b| a | b);
        std::mem::swap(flags, scratch);
        if !changed {
            return done + 1;
        }
    }
    rounds
}
