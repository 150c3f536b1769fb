use crate::error::{check_len, Result};
use crate::problem::{ConstrainedProblem, ProblemConstants};

use super::engine::{BetaRule, Engine, EngineOptions};
use super::{resolve_steps, EpochSummary, Flow, Monitor, RunResult, SolverConfig, Termination, Variant};

/// Runs `config.max_iters` iterations of APDPro from `(x0, y0)`.
///
/// Step sizes follow `τ_{k+1} = τ_k/√(1 + ρ_{k+1}τ_k)`, `σ_{k+1}τ_{k+1} =
/// σ_kτ_k`, and the dual set is cut at `ρ_k/μ̲` each iteration.
pub fn apdpro(
    problem: &ConstrainedProblem,
    constants: &ProblemConstants,
    config: &SolverConfig,
    x0: &[f64],
    y0: &[f64],
    monitor: &mut dyn Monitor,
) -> Result<RunResult> {
    config.validate()?;
    check_len("x0", x0.len(), problem.dim())?;
    check_len("y0", y0.len(), problem.num_constraints())?;
    let (tau0, sigma0) = resolve_steps(config, problem, constants)?;
    let delta_xy = constants.d_x * constants.d_x / (2.0 * tau0) + constants.d_y * constants.d_y / (2.0 * sigma0);
    let opts = EngineOptions {
        cut: true,
        adaptive: true,
        estimator: config.estimator,
        beta_rule: BetaRule::Adaptive,
        delta_xy,
    };
    let mut engine = Engine::new(problem, constants, opts, 0, tau0, sigma0, config.rho0, x0, y0);
    let mut trace = Vec::with_capacity(config.max_iters);
    let mut termination = Termination::Completed;
    for iter in 1..=config.max_iters {
        let (record, flow) = engine.step(iter, monitor)?;
        trace.push(record);
        if flow == Flow::Stop {
            termination = Termination::Stopped;
            break;
        }
    }
    Ok(RunResult {
        variant: Variant::Apdpro,
        epochs: vec![EpochSummary { start: x0.to_vec(), tau0, sigma0, iterations: trace.len() }],
        x: engine.x,
        x_bar: engine.x_bar,
        y: engine.y,
        y_bar: engine.y_bar,
        trace,
        termination,
    })
}
