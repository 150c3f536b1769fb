//! Primal-dual solver loops.
//!
//! All variants share one iteration ([`engine`]): extrapolate the constraint
//! values, project the dual ascent step onto the (possibly cut) dual set, take
//! a prox step in the primal restricted to the feasible ball, update the
//! ergodic average, then refresh the strong-convexity estimate. The variants
//! differ in how step sizes evolve and when the loop restarts:
//!
//! * [`apdpro`]: step sizes shrink/grow with the estimate `ρ_k`, dual cut on.
//! * [`rapdpro`]: restarts APDPro with epoch lengths set from `ρ̂`.
//! * [`msapd`]: constant steps per stage, stage lengths set from `ρ`, no cut.
//! * [`apd_baseline`]: the estimator switched off, optionally restarted at a
//!   fixed period.

mod apd;
mod apdpro;
mod engine;
mod msapd;
mod rapdpro;

pub use apd::apd_baseline;
pub use apdpro::apdpro;
pub use msapd::msapd;
pub use rapdpro::rapdpro;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::problem::{ConstrainedProblem, ProblemConstants};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Apdpro,
    Rapdpro,
    Msapd,
    Apd,
    ApdRestart,
}

impl Variant {
    pub const ALL: [Variant; 5] =
        [Variant::Apdpro, Variant::Rapdpro, Variant::Msapd, Variant::Apd, Variant::ApdRestart];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Apdpro => "apdpro",
            Variant::Rapdpro => "rapdpro",
            Variant::Msapd => "msapd",
            Variant::Apd => "apd",
            Variant::ApdRestart => "apd_restart",
        }
    }

    /// Iterate at which convergence is measured: the last iterate for the
    /// cut-based methods, the ergodic average otherwise.
    pub fn default_metric_iterate(self) -> MetricIterate {
        match self {
            Variant::Apdpro | Variant::Rapdpro => MetricIterate::Last,
            Variant::Msapd | Variant::Apd | Variant::ApdRestart => MetricIterate::Ergodic,
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown solver variant '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricIterate {
    Last,
    Ergodic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub variant: Variant,
    /// Initial primal step. Ignored by rAPDPro and msAPD, which derive it.
    pub tau0: Option<f64>,
    /// Initial dual step (`σ₀`, `σ̄` for rAPDPro, `σ̃` for msAPD).
    pub sigma0: Option<f64>,
    /// Initial strong-convexity bound; must satisfy `(y*)ᵀμ ≥ ρ₀`.
    pub rho0: f64,
    /// When false, `ρ` stays at `rho0` for the whole run.
    pub estimator: bool,
    /// Iteration count for APDPro/APD, total safety cap for the restarted
    /// variants.
    pub max_iters: usize,
    /// Last epoch/stage index `S`; `S + 1` epochs run.
    pub max_epochs: usize,
    pub nu0: f64,
    pub delta: f64,
    /// Restart period for `apd_restart`; `None` never restarts.
    pub restart_period: Option<usize>,
    /// msAPD stage switching on a fixed schedule: stage `s` runs
    /// `⌈N₀·√2ˢ⌉` iterations with `τ/√2ˢ` and `σ·√2ˢ`.
    pub forced_stage_iters: Option<usize>,
}

impl SolverConfig {
    pub fn new(variant: Variant) -> Self {
        Self {
            variant,
            tau0: None,
            sigma0: None,
            rho0: 0.0,
            estimator: true,
            max_iters: 1000,
            max_epochs: 10,
            nu0: 0.25,
            delta: 0.5,
            restart_period: None,
            forced_stage_iters: None,
        }
    }

    pub fn with_max_iters(mut self, n: usize) -> Self {
        self.max_iters = n;
        self
    }

    pub fn with_max_epochs(mut self, s: usize) -> Self {
        self.max_epochs = s;
        self
    }

    pub fn with_steps(mut self, tau0: f64, sigma0: f64) -> Self {
        self.tau0 = Some(tau0);
        self.sigma0 = Some(sigma0);
        self
    }

    pub fn without_estimator(mut self) -> Self {
        self.estimator = false;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.rho0 >= 0.0 && self.rho0.is_finite()) {
            return Err(Error::InvalidArgument(format!("rho0 = {} must be >= 0", self.rho0)));
        }
        for (name, v) in [("tau0", self.tau0), ("sigma0", self.sigma0)] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(Error::InvalidArgument(format!("{name} = {v} must be positive")));
                }
            }
        }
        if !(self.nu0 > 0.0 && self.nu0 < 1.0) || !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "nu0 = {} and delta = {} must lie in (0, 1)",
                self.nu0, self.delta
            )));
        }
        if self.restart_period == Some(0) || self.forced_stage_iters == Some(0) {
            return Err(Error::InvalidArgument("periods must be positive".into()));
        }
        Ok(())
    }
}

/// Step sizes that balance the two smoothness terms:
/// `L_G²σ₀ = L_XY` and `τ₀ = 1/(L_XY + L_G²σ₀)`.
pub fn default_steps(problem: &ConstrainedProblem, constants: &ProblemConstants) -> (f64, f64) {
    let lg2 = problem.l_g * problem.l_g;
    let sigma0 = if constants.l_xy > 0.0 { constants.l_xy / lg2 } else { 1.0 / lg2 };
    (1.0 / (constants.l_xy + lg2 * sigma0), sigma0)
}

pub(crate) fn resolve_steps(
    config: &SolverConfig,
    problem: &ConstrainedProblem,
    constants: &ProblemConstants,
) -> Result<(f64, f64)> {
    let (dt, ds) = default_steps(problem, constants);
    let sigma0 = config.sigma0.unwrap_or(ds);
    let tau0 = match (config.tau0, config.sigma0) {
        (Some(t), _) => t,
        (None, Some(s)) => 1.0 / (constants.l_xy + problem.l_g * problem.l_g * s),
        (None, None) => dt,
    };
    check_step_feasibility(tau0, sigma0, problem, constants)?;
    Ok((tau0, sigma0))
}

/// `τ₀⁻¹ ≥ L_XY + L_G²σ₀`
pub fn check_step_feasibility(
    tau0: f64,
    sigma0: f64,
    problem: &ConstrainedProblem,
    constants: &ProblemConstants,
) -> Result<()> {
    let lhs = 1.0 / tau0;
    let rhs = constants.l_xy + problem.l_g * problem.l_g * sigma0;
    if lhs < rhs * (1.0 - 1e-12) {
        return Err(Error::StepSizeInfeasible { lhs, rhs });
    }
    Ok(())
}

/// `τ' = τ/√(1 + ρτ)`, `σ' = στ/τ'`, `t' = σ'/σ₀`. The product `τσ` is
/// preserved.
pub fn stepsize_update(tau: f64, sigma: f64, sigma0: f64, rho_next: f64) -> (f64, f64, f64) {
    if rho_next == 0.0 {
        // exact: στ/τ may round away from σ
        return (tau, sigma, sigma / sigma0);
    }
    let tau_next = tau / (1.0 + rho_next * tau).sqrt();
    let sigma_next = sigma * tau / tau_next;
    (tau_next, sigma_next, sigma_next / sigma0)
}

/// Inner-iteration budget of an rAPDPro epoch. `None` stands for an
/// unbounded epoch (`ρ̂ = 0`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochBudget {
    pub iterations: Option<usize>,
    pub rho_hat: f64,
}

/// `ρ̂_new` from the `ρ̂` recursion at inner index `k`, then
/// `N = ⌈max{6/(ρ̂_new τ₀ˢ), √2ˢ·3√2·D_Y/(ρ̂_new·D_X·√(τ₀ˢσ₀ˢ))}⌉`.
#[allow(clippy::too_many_arguments)]
pub fn terminate_iter(
    rho_hat: f64,
    rho_next: f64,
    epoch: usize,
    k: usize,
    tau0: f64,
    sigma0: f64,
    d_x: f64,
    d_y: f64,
) -> EpochBudget {
    let rho_hat_new = crate::estimator::next_rho_hat(rho_hat, rho_next, k, tau0);
    EpochBudget { iterations: epoch_length(rho_hat_new, epoch, tau0, sigma0, d_x, d_y), rho_hat: rho_hat_new }
}

pub(crate) fn epoch_length(rho_hat: f64, epoch: usize, tau0: f64, sigma0: f64, d_x: f64, d_y: f64) -> Option<usize> {
    if !(rho_hat > 0.0) {
        return None;
    }
    let primal = 6.0 / (rho_hat * tau0);
    let dual =
        2f64.powf(epoch as f64 / 2.0) * 3.0 * std::f64::consts::SQRT_2 * d_y / (rho_hat * d_x * (tau0 * sigma0).sqrt());
    ceil_budget(primal.max(dual))
}

/// msAPD stage length `⌈max{4/(ρτ₀ˢ), D_Y²·2^{s+1}/(ρσ₀ˢD_X²)}⌉`.
pub fn stage_length(rho: f64, stage: usize, tau0: f64, sigma0: f64, d_x: f64, d_y: f64) -> Option<usize> {
    if !(rho > 0.0) {
        return None;
    }
    let primal = 4.0 / (rho * tau0);
    let dual = d_y * d_y / (rho * sigma0 * d_x * d_x) * 2f64.powi(stage as i32 + 1);
    ceil_budget(primal.max(dual))
}

fn ceil_budget(v: f64) -> Option<usize> {
    if v.is_finite() && v < usize::MAX as f64 {
        Some(v.ceil() as usize)
    } else {
        None
    }
}

/// One inner iteration, recorded after the update.
///
/// `tau`/`sigma` are the steps used in the iteration (`τ_k`, `σ_k`);
/// `tau_next`/`sigma_next` the ones it produced. `rho` and `rho_hat` are the
/// values at index `inner` (that is, `ρ_{k+1}` and `ρ̂_{k+1}`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    pub iter: usize,
    pub epoch: usize,
    pub inner: usize,
    pub tau: f64,
    pub sigma: f64,
    pub tau_next: f64,
    pub sigma_next: f64,
    /// Averaging weight `t_k`.
    pub weight: f64,
    /// `T_{k+1}`
    pub total_weight: f64,
    pub rho: f64,
    pub rho_hat: f64,
}

/// View handed to a [`Monitor`] after each iteration.
#[derive(Debug)]
pub struct StepView<'a> {
    pub record: &'a TraceRecord,
    pub x: &'a [f64],
    pub x_bar: &'a [f64],
    pub y: &'a [f64],
    pub y_bar: &'a [f64],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flow {
    Continue,
    Stop,
}

pub trait Monitor {
    fn observe(&mut self, step: &StepView<'_>) -> Flow;
}

/// Monitor that never stops the run.
#[derive(Debug, Default, Clone, Copy)]
pub struct NoMonitor;

impl Monitor for NoMonitor {
    fn observe(&mut self, _: &StepView<'_>) -> Flow {
        Flow::Continue
    }
}

impl<F: FnMut(&StepView<'_>) -> Flow> Monitor for F {
    fn observe(&mut self, step: &StepView<'_>) -> Flow {
        self(step)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// The variant's own schedule finished (iteration count or epoch list).
    Completed,
    /// The `max_iters` safety cap fired first.
    Budget,
    /// A monitor asked to stop.
    Stopped,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::Completed => "completed",
            Termination::Budget => "budget",
            Termination::Stopped => "stopped",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpochSummary {
    /// Primal point the epoch started from (`x₀ˢ`, or `x̄₀ˢ` for msAPD).
    pub start: Vec<f64>,
    pub tau0: f64,
    pub sigma0: f64,
    /// Iterations actually executed.
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub variant: Variant,
    pub x: Vec<f64>,
    pub x_bar: Vec<f64>,
    pub y: Vec<f64>,
    pub y_bar: Vec<f64>,
    pub trace: Vec<TraceRecord>,
    pub termination: Termination,
    pub epochs: Vec<EpochSummary>,
}

impl RunResult {
    pub fn iterations(&self) -> usize {
        self.trace.len()
    }

    /// Point the variant's convergence guarantee is about.
    pub fn output(&self) -> &[f64] {
        match self.variant.default_metric_iterate() {
            MetricIterate::Last => &self.x,
            MetricIterate::Ergodic => &self.x_bar,
        }
    }
}

/// Runs the configured variant from `(x0, y0)`.
pub fn solve(
    problem: &ConstrainedProblem,
    constants: &ProblemConstants,
    config: &SolverConfig,
    x0: &[f64],
    y0: &[f64],
    monitor: &mut dyn Monitor,
) -> Result<RunResult> {
    match config.variant {
        Variant::Apdpro => apdpro(problem, constants, config, x0, y0, monitor),
        Variant::Rapdpro => rapdpro(problem, constants, config, x0, y0, monitor),
        Variant::Msapd => msapd(problem, constants, config, x0, y0, monitor),
        Variant::Apd | Variant::ApdRestart => apd_baseline(problem, constants, config, x0, y0, monitor),
    }
}

/// Default starting point: the origin pulled into the feasible ball, and a
/// zero dual.
pub fn default_start(problem: &ConstrainedProblem, constants: &ProblemConstants) -> (Vec<f64>, Vec<f64>) {
    (constants.ball.project(&vec![0.0; problem.dim()]), vec![0.0; problem.num_constraints()])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stepsize_examples() {
        assert_eq!(stepsize_update(1.0, 1.0, 1.0, 3.0), (0.5, 2.0, 2.0));
        assert_eq!(stepsize_update(0.7, 1.3, 1.0, 0.0), (0.7, 1.3, 1.3));
        assert_eq!(stepsize_update(0.5, 2.0, 1.0, 6.0), (0.25, 4.0, 4.0));
    }

    #[test]
    fn terminate_iter_examples() {
        // ρ̂_new = 3 from ρ̂_old = 3, ρ = 3 at k = 1.
        let b = terminate_iter(3.0, 3.0, 0, 1, 1.0, 1.0, 1.0, 1.0);
        assert_eq!(b.rho_hat, 3.0);
        assert_eq!(b.iterations, Some(2));
        let b = terminate_iter(3.0, 3.0, 2, 1, 1.0, 1.0, 1.0, 1.0);
        assert_eq!(b.iterations, Some(3));
        let b = terminate_iter(0.0, 0.0, 0, 1, 1.0, 1.0, 1.0, 1.0);
        assert_eq!(b.iterations, None);
        assert_eq!(epoch_length(0.0, 3, 1.0, 1.0, 1.0, 1.0), None);
    }

    #[test]
    fn stage_examples() {
        assert_eq!(stage_length(1.0, 0, 1.0, 1.0, 1.0, 1.0), Some(4));
        assert_eq!(stage_length(0.0, 0, 1.0, 1.0, 1.0, 1.0), None);
        // stage step sizes: L_XY = L_G = σ̃ = 1, s = 2
        let sigma = 1.0 * 2f64.powf(2.0 / 2.0);
        let tau = 1.0 / (1.0 + 1.0 * sigma);
        assert_eq!(sigma, 2.0);
        assert!((tau - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn variant_names_round_trip() {
        for v in Variant::ALL {
            assert_eq!(v.name().parse::<Variant>().unwrap(), v);
        }
        assert!("nope".parse::<Variant>().is_err());
    }
}
