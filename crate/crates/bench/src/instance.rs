use std::path::PathBuf;
use std::sync::Arc;

use apdpro::pagerank::{build_ppr_problem, make_synthetic_instance, parse_edge_list};
use apdpro::{ConstrainedProblem, ProblemConstants};

use crate::config::InstanceSpec;
use crate::error::{BenchError, Result};
use crate::reference::Reference;

/// A constructed instance plus what is known about its solution.
#[derive(Debug, Clone)]
pub struct Instance {
    pub problem: ConstrainedProblem,
    pub constants: ProblemConstants,
    /// Closed-form KKT pair (synthetic instances only).
    pub oracle: Option<Reference>,
    /// Graph file and its bytes, used to key cached references.
    pub source: Option<(PathBuf, Vec<u8>)>,
    /// Canonical description of the parameters, part of the cache key.
    pub fingerprint: String,
}

pub fn build_instance(spec: &InstanceSpec) -> Result<Instance> {
    match spec {
        InstanceSpec::Synthetic { center, level } => {
            let inst = make_synthetic_instance(center, *level)?;
            Ok(Instance {
                oracle: Some(Reference { x: inst.x_star, y: inst.y_star, f_star: inst.f_star }),
                problem: inst.problem,
                constants: inst.constants,
                source: None,
                fingerprint: format!("synthetic center={center:?} level={level:e}"),
            })
        }
        InstanceSpec::Graph { path, alpha, b, teleport, radius_rule } => {
            let bytes = std::fs::read(path).map_err(|e| BenchError::io(path, e))?;
            let text = String::from_utf8(bytes.clone())
                .map_err(|_| BenchError::Config(format!("{} is not UTF-8", path.display())))?;
            let graph = Arc::new(parse_edge_list(&text)?);
            let ppr = build_ppr_problem(graph, *alpha, *b, teleport, *radius_rule)?;
            Ok(Instance {
                problem: ppr.problem,
                constants: ppr.constants,
                oracle: None,
                fingerprint: format!("ppr alpha={alpha:e} b={b:e} teleport={teleport:?} r={radius_rule:?}"),
                source: Some((path.clone(), bytes)),
            })
        }
    }
}
