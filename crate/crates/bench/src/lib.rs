//! Experiment harness for the `apdpro` solvers: builds instances from config
//! files, obtains reference solutions, records convergence metrics and writes
//! CSV traces.

// `!(a > b)` comparisons are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod experiment;
pub mod instance;
pub mod metrics;
pub mod oracles;
pub mod reference;
pub mod selftest;

pub use config::ExperimentConfig;
pub use error::{BenchError, Result};
pub use experiment::{run_comparison, run_experiment, Outcome};
