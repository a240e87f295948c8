//! Orthogonal Vectors, its reduction to graph diameter, an exact
//! treewidth-parameterized diameter engine, and closure arithmetic on
//! parameterized running-time bounds.

pub mod bench;
pub mod calculus;
pub mod cnf;
pub mod error;
pub mod generate;
pub mod graph;
pub mod ov;
pub mod paths;
pub mod reductions;
pub mod td;
pub mod twdiam;

pub use calculus::{compose_closure, expr_compare, minimum_necessary_set, Comparison, FpiClaim, ReductionDescriptor, RuntimeExpr};
pub use cnf::{parse_dimacs, sat_brute, write_dimacs, CnfInstance};
pub use error::{Error, Result};
pub use graph::{parse_graph, write_graph, LabeledGraph, Role};
pub use ov::{ov_brute, parse_ov, write_ov, BitVector, OvInstance};
pub use paths::{diameter_brute, shortest_paths, DistanceTable};
pub use reductions::{mapping_report, ov_graph_decomposition, ov_to_diameter, sat_to_ov, MappingRecord};
pub use td::{parse_td, validate_td, write_td, TdReport, TreeDecomposition};
pub use twdiam::{diameter_td, solve_ov_via_diameter};
