//! Exact diameter parameterized by a tree decomposition.

mod centroid;
mod cross;
mod dominance;
mod engine;
mod pipeline;

pub use centroid::centroid_bag;
pub use cross::{canonical_minimizer, cross_pair_max, cross_pair_max_naive, in_minimizer_class, CrossConfig, CrossMethod, CrossOutcome};
pub use dominance::{dominance_max_query, DominanceIndex};
pub use engine::{diameter_td, diameter_td_observed, diameter_td_with, EngineConfig, EngineStats, NodeView, Observer};
pub use pipeline::{solve_ov_via_diameter, SolveOptions, SolveReport, DEFAULT_MAX_D};
