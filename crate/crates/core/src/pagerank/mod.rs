//! Personalized PageRank instances and known-solution synthetic instances.

mod graph;
mod instance;
mod synthetic;

pub use graph::{load_graph, parse_edge_list, Graph};
pub use instance::{build_ppr_problem, spectral_bounds, PprInstance, PprOperator, RadiusRule, Teleport};
pub use synthetic::{canonical_instance, make_synthetic_instance, SyntheticInstance};
