use crate::error::{check_len, Error, Result};
use crate::problem::{ConstrainedProblem, ProblemConstants};

use super::engine::{BetaRule, Engine, EngineOptions};
use super::{epoch_length, EpochSummary, Flow, Monitor, RunResult, SolverConfig, Termination, Variant};

/// `τ̄ = (1 − ν₀)/(L_XY + L_G²σ̄/δ)` and `σ̄` (default `δ·L_XY/L_G²`).
pub fn restart_steps(
    config: &SolverConfig,
    problem: &ConstrainedProblem,
    constants: &ProblemConstants,
) -> Result<(f64, f64)> {
    let lg2 = problem.l_g * problem.l_g;
    let sigma = match config.sigma0 {
        Some(s) => s,
        None if constants.l_xy > 0.0 => config.delta * constants.l_xy / lg2,
        None => config.delta / lg2,
    };
    let tau = (1.0 - config.nu0) / (constants.l_xy + lg2 * sigma / config.delta);
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::InvalidArgument(format!("restart step size {tau} is not positive")));
    }
    Ok((tau, sigma))
}

/// Restarted APDPro: epochs `s = 0..=S`, each an APDPro run from the
/// previous epoch's last iterate with fresh steps `(τ̄, σ̄)`, the `ρ` estimate
/// carried over, and a length set by the `ρ̂` recursion. `max_iters` caps the
/// total iteration count.
pub fn rapdpro(
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
    let (tau0, sigma0) = restart_steps(config, problem, constants)?;
    let (d_x, d_y) = (constants.d_x, constants.d_y);
    let delta_xy = d_x * d_x / tau0 + d_y * d_y / (2.0 * sigma0);
    let opts = EngineOptions {
        cut: true,
        adaptive: true,
        estimator: config.estimator,
        beta_rule: BetaRule::Adaptive,
        delta_xy,
    };

    let mut x = x0.to_vec();
    let mut y = y0.to_vec();
    let mut rho = config.rho0;
    let mut trace = Vec::new();
    let mut epochs = Vec::new();
    let mut termination = Termination::Completed;
    let (mut x_bar, mut y_bar) = (x.clone(), y.clone());

    'epochs: for s in 0..=config.max_epochs {
        let mut engine = Engine::new(problem, constants, opts, s, tau0, sigma0, rho, &x, &y);
        epochs.push(EpochSummary { start: x.clone(), tau0, sigma0, iterations: 0 });
        loop {
            // An unbounded epoch (ρ̂ = 0) runs into the iteration cap.
            let budget = if engine.k == 0 { Some(1) } else { epoch_length(engine.rho_hat, s, tau0, sigma0, d_x, d_y) };
            if budget.is_some_and(|n| engine.k >= n) {
                break;
            }
            if trace.len() >= config.max_iters {
                termination = Termination::Budget;
                break;
            }
            let (record, flow) = engine.step(trace.len() + 1, monitor)?;
            trace.push(record);
            if flow == Flow::Stop {
                termination = Termination::Stopped;
                break;
            }
        }
        epochs.last_mut().expect("epoch pushed").iterations = engine.k;
        rho = engine.rho;
        x = engine.x;
        y = engine.y;
        x_bar = engine.x_bar;
        y_bar = engine.y_bar;
        if termination != Termination::Completed {
            break 'epochs;
        }
    }

    Ok(RunResult { variant: Variant::Rapdpro, x, x_bar, y, y_bar, trace, termination, epochs })
}
