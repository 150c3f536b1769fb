use std::fs::File;
use std::path::{Path, PathBuf};
use std::time::Instant;

use apdpro::problem::kkt_residual;
use apdpro::solvers::{default_start, solve, Flow, MetricIterate, RunResult, SolverConfig, StepView};

use crate::config::{ExperimentConfig, StartPoint};
use crate::error::{BenchError, Result};
use crate::instance::{build_instance, Instance};
use crate::metrics::{compute_metrics, IterateRecord, CSV_HEADER};
use crate::reference::{reference_solution, Reference};

#[derive(Debug)]
pub struct Outcome {
    pub run: RunResult,
    pub csv_path: PathBuf,
    pub rows: usize,
    pub last: Option<IterateRecord>,
    /// Set when a long-run reference did not converge; the reference-based
    /// metrics are then absent.
    pub reference_warning: Option<String>,
}

/// Builds the instance and resolves the reference. An unconverged long run is
/// not fatal: it is reported and the run proceeds without a reference.
pub fn prepare(config: &ExperimentConfig) -> Result<(Instance, Option<Reference>, Option<String>)> {
    let instance = build_instance(&config.instance)?;
    match reference_solution(&instance, &config.reference) {
        Ok(r) => Ok((instance, r, None)),
        Err(e @ BenchError::ReferenceUnconverged { .. }) => Ok((instance, None, Some(e.to_string()))),
        Err(e) => Err(e),
    }
}

/// Runs the first configured solver and writes its trace to the output path.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Outcome> {
    let (instance, reference, warning) = prepare(config)?;
    let mut out = run_solver(config, config.solver(), &instance, reference.as_ref(), &config.output.path)?;
    out.reference_warning = warning;
    Ok(out)
}

/// Runs every configured solver, one CSV each (`<stem>_<variant>.csv`).
pub fn run_comparison(config: &ExperimentConfig) -> Result<Vec<Outcome>> {
    let (instance, reference, warning) = prepare(config)?;
    let mut outcomes = Vec::new();
    for solver in &config.solvers {
        let path = variant_path(&config.output.path, solver.variant.name());
        let mut out = run_solver(config, solver, &instance, reference.as_ref(), &path)?;
        out.reference_warning = warning.clone();
        outcomes.push(out);
    }
    Ok(outcomes)
}

pub fn variant_path(path: &Path, variant: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "trace".into());
    let ext = path.extension().map(|e| e.to_string_lossy().into_owned()).unwrap_or_else(|| "csv".into());
    path.with_file_name(format!("{stem}_{variant}.{ext}"))
}

pub fn run_solver(
    config: &ExperimentConfig,
    solver: &SolverConfig,
    instance: &Instance,
    reference: Option<&Reference>,
    csv_path: &Path,
) -> Result<Outcome> {
    if let Some(dir) = csv_path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| BenchError::io(dir, e))?;
    }
    let file = File::create(csv_path).map_err(|e| BenchError::io(csv_path, e))?;
    let mut writer = csv::Writer::from_writer(file);
    writer.write_record(CSV_HEADER)?;

    let which = config.metric_iterate.unwrap_or(solver.variant.default_metric_iterate());
    let problem = &instance.problem;
    let (x0, y0) = start_point(config.start, instance);
    let stride = config.output.stride;
    let mut rows = 0usize;
    let mut last = None;
    let mut write_error = None;
    let start = Instant::now();

    let mut monitor = |step: &StepView<'_>| {
        let rec =
            compute_metrics(problem, step, which, reference, config.output.truncation, start.elapsed().as_secs_f64());
        if step.record.iter.is_multiple_of(stride) {
            if let Err(e) = writer.write_record(rec.csv_fields()) {
                write_error = Some(e);
                return Flow::Stop;
            }
            rows += 1;
        }
        let converged = config.tolerance.is_some_and(|tol| tracked_residual(problem, step, which, &rec) <= tol);
        last = Some(rec);
        if converged {
            Flow::Stop
        } else {
            Flow::Continue
        }
    };
    let run = solve(problem, &instance.constants, solver, &x0, &y0, &mut monitor)?;
    if let Some(e) = write_error {
        return Err(e.into());
    }
    writer.flush().map_err(|e| BenchError::io(csv_path, e))?;
    Ok(Outcome { run, csv_path: csv_path.to_path_buf(), rows, last, reference_warning: None })
}

pub fn start_point(start: StartPoint, instance: &Instance) -> (Vec<f64>, Vec<f64>) {
    let (x0, y0) = default_start(&instance.problem, &instance.constants);
    match start {
        StartPoint::Origin => (x0, y0),
        StartPoint::Center => (instance.constants.ball.center.clone(), y0),
    }
}

/// `max(rel_gap, feas_violation)` with a reference, KKT residual otherwise.
fn tracked_residual(
    problem: &apdpro::ConstrainedProblem,
    step: &StepView<'_>,
    which: MetricIterate,
    rec: &IterateRecord,
) -> f64 {
    match rec.rel_gap {
        Some(gap) => gap.max(rec.feas_violation),
        None => {
            let (x, y) = match which {
                MetricIterate::Last => (step.x, step.y),
                MetricIterate::Ergodic => (step.x_bar, step.y_bar),
            };
            kkt_residual(problem, x, y).map(|k| k.max()).unwrap_or(f64::INFINITY)
        }
    }
}
