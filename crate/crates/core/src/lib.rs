//! Individual-bias fairness measures for community detection.
//!
//! The crate compares a ground-truth [`Partition`] with a predicted one and
//! reports, for every node, the cosine distance between its two community
//! co-occurrence rows (the node's *individual bias*), plus the population
//! standard deviation of those values over the whole graph. Co-occurrence
//! rows are never materialised outside the test oracle: every score is
//! derived from a [`ContingencyTable`] in `O(n + cells)`.
//!
//! Around the measure sit the pieces needed to run a full evaluation:
//! quality metrics ([`quality`]), the slope-based group-fairness measure
//! ([`group`]), three reference detectors ([`detect`]), synthetic
//! benchmark generators ([`synth`]) and the perturbation lab that traces IB
//! response curves ([`perturb`]).
//!
//! With the default `parallel` feature, per-node and per-point loops run on
//! rayon; [`Execution::Sequential`] is always available and produces
//! bit-identical results.

pub mod bias;
pub mod detect;
mod error;
pub mod exec;
pub mod graph;
pub mod group;
pub mod partition;
pub mod perturb;
pub mod quality;
pub mod seed;
pub mod synth;

pub use bias::{cosine_distance, ib_all_fast, ib_all_naive, BiasReport};
pub use error::{Error, Result};
pub use exec::Execution;
pub use graph::{Graph, IdMode, LoadedGraph, NodeMap};
pub use partition::{ContingencyTable, Partition};
