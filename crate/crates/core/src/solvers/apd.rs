use crate::error::{check_len, Result};
use crate::problem::{ConstrainedProblem, ProblemConstants};

use super::engine::{BetaRule, Engine, EngineOptions};
use super::{resolve_steps, EpochSummary, Flow, Monitor, RunResult, SolverConfig, Termination, Variant};

/// The plain accelerated primal-dual baseline: constant steps, uniform
/// averaging, no dual cut and no estimator.
///
/// With `Variant::ApdRestart` and a `restart_period`, every period the run
/// re-centres at its ergodic average and starts a fresh average.
pub fn apd_baseline(
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
    let opts =
        EngineOptions { cut: false, adaptive: false, estimator: false, beta_rule: BetaRule::Constant, delta_xy: 0.0 };
    let mut engine = Engine::new(problem, constants, opts, 0, tau0, sigma0, 0.0, x0, y0);
    let period = match config.variant {
        Variant::ApdRestart => config.restart_period,
        _ => None,
    };
    let mut trace = Vec::with_capacity(config.max_iters);
    let mut epochs = vec![EpochSummary { start: x0.to_vec(), tau0, sigma0, iterations: 0 }];
    let mut termination = Termination::Completed;
    for iter in 1..=config.max_iters {
        let (record, flow) = engine.step(iter, monitor)?;
        trace.push(record);
        epochs.last_mut().expect("one epoch").iterations += 1;
        if flow == Flow::Stop {
            termination = Termination::Stopped;
            break;
        }
        if period.is_some_and(|p| engine.k >= p) && iter < config.max_iters {
            let (xb, yb) = (engine.x_bar.clone(), engine.y_bar.clone());
            engine.restart_at(&xb, &yb);
            engine.epoch += 1;
            epochs.push(EpochSummary { start: xb, tau0, sigma0, iterations: 0 });
        }
    }
    Ok(RunResult {
        variant: config.variant,
        x: engine.x,
        x_bar: engine.x_bar,
        y: engine.y,
        y_bar: engine.y_bar,
        trace,
        termination,
        epochs,
    })
}
