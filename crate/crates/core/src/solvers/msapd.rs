use crate::error::{check_len, Result};
use crate::problem::{ConstrainedProblem, ProblemConstants};

use super::engine::{BetaRule, Engine, EngineOptions};
use super::{stage_length, EpochSummary, Flow, Monitor, RunResult, SolverConfig, Termination, Variant};

/// Stage steps `σ₀ˢ = σ̃·2^{s/2}`, `τ₀ˢ = 1/(L_XY + L_G²σ₀ˢ)`.
pub fn stage_steps(sigma_tilde: f64, stage: usize, l_xy: f64, l_g: f64) -> (f64, f64) {
    let sigma = sigma_tilde * 2f64.powf(stage as f64 / 2.0);
    (1.0 / (l_xy + l_g * l_g * sigma), sigma)
}

/// Multi-stage APD. Each stage runs constant-step APD on the uncut dual set
/// from the previous stage's ergodic average, for as many iterations as the
/// current `ρ` estimate demands. With `forced_stage_iters = N₀`, stage `s`
/// instead runs `⌈N₀√2ˢ⌉` iterations with `τ₀⁰/√2ˢ` and `σ₀⁰√2ˢ`.
pub fn msapd(
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
    let lg2 = problem.l_g * problem.l_g;
    let sigma_tilde = config.sigma0.unwrap_or(if constants.l_xy > 0.0 { constants.l_xy / lg2 } else { 1.0 / lg2 });
    let (d_x, d_y) = (constants.d_x, constants.d_y);
    let (base_tau, base_sigma) = stage_steps(sigma_tilde, 0, constants.l_xy, problem.l_g);

    let mut x_bar = x0.to_vec();
    let mut y_bar = y0.to_vec();
    let (mut x, mut y) = (x_bar.clone(), y_bar.clone());
    let mut rho = config.rho0;
    let mut trace = Vec::new();
    let mut epochs = Vec::new();
    let mut termination = Termination::Completed;

    for s in 0..=config.max_epochs {
        let root = 2f64.powf(s as f64 / 2.0);
        let (tau0, sigma0, forced) = match config.forced_stage_iters {
            Some(n0) => (base_tau / root, base_sigma * root, Some((n0 as f64 * root).ceil() as usize)),
            None => {
                let (t, g) = stage_steps(sigma_tilde, s, constants.l_xy, problem.l_g);
                (t, g, None)
            }
        };
        let delta_xy = d_x * d_x / (2.0 * tau0) + d_y * d_y / (2.0 * sigma0);
        let opts = EngineOptions {
            cut: false,
            adaptive: false,
            estimator: config.estimator,
            beta_rule: BetaRule::Constant,
            delta_xy,
        };
        let mut engine = Engine::new(problem, constants, opts, s, tau0, sigma0, rho, &x_bar, &y_bar);
        epochs.push(EpochSummary { start: x_bar.clone(), tau0, sigma0, iterations: 0 });
        loop {
            let budget = match forced {
                Some(n) => Some(n),
                None if engine.k == 0 => Some(1),
                None => stage_length(engine.rho, s, tau0, sigma0, d_x, d_y),
            };
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
        epochs.last_mut().expect("stage pushed").iterations = engine.k;
        rho = engine.rho;
        x = engine.x;
        y = engine.y;
        if engine.k > 0 {
            x_bar = engine.x_bar;
            y_bar = engine.y_bar;
        }
        if termination != Termination::Completed {
            break;
        }
    }

    Ok(RunResult { variant: Variant::Msapd, x, x_bar, y, y_bar, trace, termination, epochs })
}
