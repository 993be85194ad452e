//! Test functions mapping a hypergraph to a binary decision.
//!
//! Detectors accept only a [`DUniformHypergraph`](crate::model::DUniformHypergraph);
//! the hidden clique never reaches them.

mod edge_count;
mod exhaustive;
mod metropolis;
mod slice_vote;
mod spectral;

pub use edge_count::{edge_count_statistic, edge_count_test};
pub use exhaustive::{
    exhaustive_k_star, exhaustive_test, max_clique_exhaustive, max_clique_with_budget, DEFAULT_EPSILON,
};
pub use metropolis::{
    default_steps, metropolis_search, metropolis_test, MetropolisChain, MoveCounts, DEFAULT_LAMBDA,
};
pub use slice_vote::{
    calibrate_slice_null, sample_slice_tuples, slice_vote_statistic, slice_vote_test, SliceNullTable,
};
pub use spectral::{spectral_statistic, spectral_test, SpectralSettings};

#[derive(Debug, Clone, PartialEq)]
pub struct TestResult {
    pub detector: String,
    pub statistic: f64,
    pub threshold: f64,
    pub decision: bool,
    /// Seconds.
    pub wall_time: f64,
}

impl TestResult {
    pub(crate) fn new(detector: &str, statistic: f64, threshold: f64, wall_time: f64) -> Self {
        TestResult {
            detector: detector.to_string(),
            statistic,
            threshold,
            decision: decide(statistic, threshold),
            wall_time,
        }
    }
}

/// Strict rule: ties go to 0.
#[inline]
pub fn decide(statistic: f64, threshold: f64) -> bool {
    statistic > threshold
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliqueSearchResult {
    pub best_clique: Vec<usize>,
    pub size: usize,
    pub steps_or_nodes: u64,
}
