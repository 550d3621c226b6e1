//! Graph coarsening around maximal k-independent sets.
//!
//! The pipeline ranks nodes, selects a maximal k-independent set with a
//! deterministic parallel greedy algorithm ([`kmis::k_mis`]), partitions the
//! graph around the selected centroids ([`coarsen::cluster`]) and contracts
//! each cluster into one coarse node ([`coarsen::reduce`]).
//!
//! ```
//! use kcoarse::coarsen::{coarsen_pipeline, AggregationSpec, RankingSpec};
//! use kcoarse::generators;
//!
//! let g = generators::grid(8, 8, false);
//! let c = coarsen_pipeline(&g, 1, &RankingSpec::KWeight, &AggregationSpec::default(), None)
//!     .unwrap();
//! assert!(c.coarse.graph.n() < g.n());
//! assert_eq!(c.coarse.graph.connected_components().0, 1);
//! ```
//!
//! All parallel work runs on the ambient rayon pool. Results are identical
//! for every pool size.

pub mod coarsen;
pub mod generators;
pub mod graph;
pub mod io;
pub mod kmis;
pub mod oracle;
mod propagate;
pub mod ranking;
pub mod verify;

pub use coarsen::{coarsen_pipeline, AggregationSpec, CoarsenedGraph, Partition, RankingSpec};
pub use graph::{Graph, NodeWeights};
pub use kmis::{k_mis, KMisResult};
pub use ranking::Ranking;
