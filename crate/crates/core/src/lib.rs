//! Bipartite graphs given as conjunctive normal forms of clause graphs.
//!
//! A [`ClauseSystem`] stores, for each vertex, the mask of clauses that
//! exclude it; a left and right vertex are adjacent exactly when their masks
//! are disjoint. On top of that representation the crate provides seeded
//! random construction, exact K_{2,2} counting, pruning to a K_{2,2}-free
//! subgraph with the same clause count, closed-form probabilities and a
//! Monte Carlo harness comparing the two.

pub mod analytics;
pub mod bounds;
pub mod caps;
pub mod error;
pub mod experiment;
pub mod graph;
pub mod io;
pub mod mask;
pub mod pruning;
pub mod random;

pub use analytics::{
    average_degree, count_k22, count_k22_class_pairs, count_k22_explicit, count_k22_wedge,
    count_k22_zeta, degree, degree_trace, degree_with_zeta, degrees, distinct_neighborhood_count,
    distinct_neighborhood_count_explicit, subset_zeta, Algorithm, DegreeTrace, K22Report,
    ZetaTable,
};
pub use caps::Caps;
pub use error::{Error, Result};
pub use graph::{clause_graph_contains, ClauseSystem, ExplicitBipartiteGraph, MaskHistogram, Side};
pub use io::Instance;
pub use mask::Mask;
pub use pruning::{default_threshold, prune, prune_with, PruneOptions, PruneStats, PrunedGraph};
pub use random::{
    choose_clause_count, replicate_seed, sample_bernoulli_graph, sample_cnf, stream_rng,
    ModelParams, SampleOptions, Validation,
};
