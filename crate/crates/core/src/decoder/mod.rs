//! Typical-set edge construction, candidate-graph analysis and the
//! partition decoders.

mod bayes;
mod bipartize;
mod graph;
mod odd_cycle;
mod partition;
mod typical;

pub use bayes::{bayesian_decode, pair_log_likelihoods, BAYES_MAX_USERS};
pub use bipartize::{min_edge_bipartize, Bipartization};
pub use graph::{build_candidate_graph, CandidateBuild, CandidateGraph, Edge};
pub use odd_cycle::{lies_on_odd_cycle, OddCycleIndex};
pub use partition::{
    decode, decode_detailed, distortion, suboptimal_success, two_coloring, DecodeReport, Partition,
};
pub use typical::{
    count_patterns, full_typical_membership, marginal_typical, simplified_edge_test, typical_count,
    BlockSplit, PatternCounts, Strictness,
};
