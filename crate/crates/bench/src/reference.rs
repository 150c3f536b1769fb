//! Reference solutions: the closed-form oracle of synthetic instances, long
//! rAPDPro runs certified by their KKT residual, and a small text format for
//! storing them.
//!
//! File format, one item per line:
//!
//! ```text
//! f_star <value>
//! x <v1> <v2> ...
//! y <v1> ...
//! ```

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use apdpro::problem::kkt_residual;
use apdpro::solvers::{default_start, rapdpro, Flow, SolverConfig, StepView, Variant};
use sha2::{Digest, Sha256};

use crate::config::{ReferenceMode, ReferenceSpec};
use crate::error::{BenchError, Result};
use crate::instance::Instance;

#[derive(Debug, Clone, PartialEq)]
pub struct Reference {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub f_star: f64,
}

impl Reference {
    pub fn to_text(&self) -> String {
        let mut s = format!("f_star {:e}\nx", self.f_star);
        for v in &self.x {
            write!(s, " {v:e}").unwrap();
        }
        s.push_str("\ny");
        for v in &self.y {
            write!(s, " {v:e}").unwrap();
        }
        s.push('\n');
        s
    }

    pub fn from_text(text: &str) -> std::result::Result<Self, String> {
        let (mut f_star, mut x, mut y) = (None, None, None);
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            let mut words = line.split_whitespace();
            let key = words.next().unwrap_or_default();
            let values = words
                .map(|w| w.parse::<f64>().map_err(|_| format!("bad number '{w}'")))
                .collect::<std::result::Result<Vec<_>, _>>()?;
            match key {
                "f_star" if values.len() == 1 => f_star = Some(values[0]),
                "x" => x = Some(values),
                "y" => y = Some(values),
                _ => return Err(format!("unexpected line '{line}'")),
            }
        }
        match (f_star, x, y) {
            (Some(f_star), Some(x), Some(y)) => Ok(Self { x, y, f_star }),
            _ => Err("needs f_star, x and y lines".into()),
        }
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| BenchError::io(path, e))?;
        Self::from_text(&text)
            .map_err(|message| BenchError::ReferenceFile { path: path.display().to_string(), message })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()).map_err(|e| BenchError::io(path, e))
    }
}

/// Runs rAPDPro until the KKT residual at the last iterate is at most
/// `spec.kkt_tol`, within `spec.max_iters` iterations.
pub fn long_run_reference(instance: &Instance, spec: &ReferenceSpec) -> Result<Reference> {
    let problem = &instance.problem;
    let mut config = SolverConfig::new(Variant::Rapdpro).with_max_iters(spec.max_iters);
    config.max_epochs = usize::MAX - 1;
    let (x0, y0) = default_start(problem, &instance.constants);
    let mut best = f64::INFINITY;
    let mut monitor = |step: &StepView<'_>| {
        let res = kkt_residual(problem, step.x, step.y).map(|k| k.max()).unwrap_or(f64::INFINITY);
        best = best.min(res);
        if res <= spec.kkt_tol {
            Flow::Stop
        } else {
            Flow::Continue
        }
    };
    let run = rapdpro(problem, &instance.constants, &config, &x0, &y0, &mut monitor)?;
    let residual = kkt_residual(problem, &run.x, &run.y)?.max();
    if residual > spec.kkt_tol {
        return Err(BenchError::ReferenceUnconverged { residual: best.min(residual), iterations: run.iterations() });
    }
    Ok(Reference { f_star: problem.objective.eval(&run.x), x: run.x, y: run.y })
}

/// Cache file beside the graph file, keyed by a hash of the graph bytes and
/// the instance parameters.
pub fn cache_path(instance: &Instance, spec: &ReferenceSpec) -> Option<PathBuf> {
    let (path, bytes) = instance.source.as_ref()?;
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    hasher.update(instance.fingerprint.as_bytes());
    hasher.update(format!("kkt_tol={:e}", spec.kkt_tol).as_bytes());
    let digest = hex::encode(&hasher.finalize()[..8]);
    let name = path.file_name()?.to_string_lossy().into_owned();
    Some(path.with_file_name(format!("{name}.ref-{digest}.txt")))
}

/// Resolves the reference for an instance according to `spec`.
pub fn reference_solution(instance: &Instance, spec: &ReferenceSpec) -> Result<Option<Reference>> {
    match &spec.mode {
        ReferenceMode::None => Ok(None),
        ReferenceMode::Oracle => instance.oracle.clone().map(Some).ok_or_else(|| {
            apdpro::Error::InvalidArgument("oracle references exist only for synthetic instances".into()).into()
        }),
        ReferenceMode::File(path) => Ok(Some(Reference::read(path)?)),
        ReferenceMode::LongRun => {
            let cache = if spec.cache { cache_path(instance, spec) } else { None };
            if let Some(path) = cache.as_deref().filter(|p| p.exists()) {
                return Ok(Some(Reference::read(path)?));
            }
            let reference = long_run_reference(instance, spec)?;
            if let Some(path) = cache {
                reference.write(&path)?;
            }
            Ok(Some(reference))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::InstanceSpec;
    use crate::instance::build_instance;

    #[test]
    fn text_round_trip_is_exact() {
        let r = Reference { x: vec![0.1, 2.0 - 2f64.sqrt(), -3e-300], y: vec![0.5f64.sqrt()], f_star: 1.0 / 3.0 };
        assert_eq!(Reference::from_text(&r.to_text()).unwrap(), r);
        assert!(Reference::from_text("x 1\ny 2\n").is_err());
        assert!(Reference::from_text("f_star a\nx\ny\n").is_err());
    }

    #[test]
    fn oracle_mode() {
        let inst = build_instance(&InstanceSpec::Synthetic { center: vec![2.0], level: 1.0 }).unwrap();
        let spec = ReferenceSpec { mode: ReferenceMode::Oracle, ..Default::default() };
        let r = reference_solution(&inst, &spec).unwrap().unwrap();
        let x = 2.0 - 2f64.sqrt();
        assert!((r.x[0] - x).abs() < 1e-14);
        assert!((r.y[0] - 0.5f64.sqrt()).abs() < 1e-14);
        assert!((r.f_star - x).abs() < 1e-14);
    }

    #[test]
    fn long_run_meets_kkt_tolerance() {
        let inst = build_instance(&InstanceSpec::Synthetic { center: vec![2.0, -1.0, 0.2], level: 0.8 }).unwrap();
        let spec = ReferenceSpec { mode: ReferenceMode::LongRun, ..Default::default() };
        let r = long_run_reference(&inst, &spec).unwrap();
        let k = kkt_residual(&inst.problem, &r.x, &r.y).unwrap();
        assert!(k.max() <= 1e-10);
        let oracle = inst.oracle.unwrap();
        assert!(apdpro::linalg::dist(&r.x, &oracle.x) < 1e-6);
    }
}
