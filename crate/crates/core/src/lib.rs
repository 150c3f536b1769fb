//! Adaptive primal-dual methods for minimizing a weighted sum of block norms
//! subject to strongly convex functional constraints.
//!
//! The central idea: along the run, certified lower bounds on the optimal
//! multipliers are computed from the iterates. They translate into a lower
//! bound `ρ` on the strong convexity of the Lagrangian in `x`, which is used
//! to cut the dual feasible set and to take more aggressive primal steps.

// `!(a > b)` comparisons are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod estimator;
pub mod linalg;
pub mod pagerank;
pub mod problem;
pub mod prox;
pub mod solvers;

pub use error::{Error, Result};
pub use problem::{constants_for, Ball, BlockNormObjective, ConstrainedProblem, ConstraintMap, ProblemConstants};
pub use solvers::{solve, RunResult, SolverConfig, Termination, Variant};
