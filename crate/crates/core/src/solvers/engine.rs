use crate::error::Result;
use crate::estimator::{improve, next_rho_hat, EstimatorConstants};
use crate::problem::{ConstrainedProblem, ProblemConstants};
use crate::prox::{project_dual_set_into, prox_f_over_ball_into, DualSlab};

use super::{stepsize_update, Flow, Monitor, StepView, TraceRecord};

/// Which valid radius bounds feed the estimator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum BetaRule {
    /// `β = σ₀τ_{k−1}Δ/σ_{k−1}`, `β̄ = Δ/T_k` (adaptive-step runs).
    Adaptive,
    /// `β = ½D_X²`, `β̄ = Δ/k` (constant-step stages).
    Constant,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct EngineOptions {
    /// Cut the dual set at `ρ/μ̲`.
    pub cut: bool,
    /// Shrink `τ`/grow `σ` with `ρ`; averaging weights `σ_k/σ₀`.
    pub adaptive: bool,
    pub estimator: bool,
    pub beta_rule: BetaRule,
    /// `Δ_XY` for this epoch.
    pub delta_xy: f64,
}

/// State of one run of the primal-dual iteration between restarts.
pub(crate) struct Engine<'a> {
    problem: &'a ConstrainedProblem,
    constants: &'a ProblemConstants,
    est: EstimatorConstants,
    opts: EngineOptions,
    pub epoch: usize,
    pub tau0: f64,
    pub sigma0: f64,
    pub tau: f64,
    pub sigma: f64,
    tau_prev: f64,
    sigma_prev: f64,
    pub rho: f64,
    pub rho_hat: f64,
    /// Inner index `k`.
    pub k: usize,
    pub total_weight: f64,
    pub x: Vec<f64>,
    x_prev: Vec<f64>,
    pub y: Vec<f64>,
    pub x_bar: Vec<f64>,
    pub y_bar: Vec<f64>,
    g_x: Vec<f64>,
    g_prev: Vec<f64>,
    // scratch
    z: Vec<f64>,
    grad: Vec<f64>,
    x_next: Vec<f64>,
    y_next: Vec<f64>,
}

impl<'a> Engine<'a> {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        problem: &'a ConstrainedProblem,
        constants: &'a ProblemConstants,
        opts: EngineOptions,
        epoch: usize,
        tau0: f64,
        sigma0: f64,
        rho: f64,
        x0: &[f64],
        y0: &[f64],
    ) -> Self {
        let n = problem.dim();
        let m = problem.num_constraints();
        let mut g_x = vec![0.0; m];
        problem.constraints.eval(x0, &mut g_x);
        Self {
            problem,
            constants,
            est: EstimatorConstants { r: problem.r, l_x: problem.l_x, mu_lb: constants.mu_lb },
            opts,
            epoch,
            tau0,
            sigma0,
            tau: tau0,
            sigma: sigma0,
            tau_prev: tau0,
            sigma_prev: sigma0,
            rho,
            rho_hat: 0.0,
            k: 0,
            total_weight: 0.0,
            x: x0.to_vec(),
            x_prev: x0.to_vec(),
            y: y0.to_vec(),
            x_bar: x0.to_vec(),
            y_bar: y0.to_vec(),
            g_prev: g_x.clone(),
            g_x,
            z: vec![0.0; m],
            grad: vec![0.0; n],
            x_next: vec![0.0; n],
            y_next: vec![0.0; m],
        }
    }

    fn slab(&self) -> Result<DualSlab> {
        let upper = self.constants.c_bar;
        let lower = if self.opts.cut {
            // Guard the cut against rounding pushing it past the upper bound.
            let cap = self.constants.mu_lb * upper * (1.0 - 1e-12);
            self.rho.min(cap) / self.constants.mu_lb
        } else {
            0.0
        };
        DualSlab::new(lower, upper)
    }

    fn betas(&self) -> (f64, f64) {
        let delta = self.opts.delta_xy;
        match self.opts.beta_rule {
            BetaRule::Adaptive => {
                let beta = self.sigma0 * self.tau_prev * delta / self.sigma_prev;
                let beta_bar = if self.total_weight > 0.0 { delta / self.total_weight } else { f64::INFINITY };
                (beta, beta_bar)
            }
            BetaRule::Constant => {
                let beta = 0.5 * self.constants.d_x * self.constants.d_x;
                let beta_bar = if self.k > 0 { delta / self.k as f64 } else { f64::INFINITY };
                (beta, beta_bar)
            }
        }
    }

    /// One iteration `k → k + 1`. Returns the trace record; the monitor sees
    /// the new state before the caller continues.
    pub fn step(&mut self, iter: usize, monitor: &mut dyn Monitor) -> Result<(TraceRecord, Flow)> {
        let slab = self.slab()?;

        // dual: extrapolated constraint values, then projected ascent
        let ratio = self.sigma_prev / self.sigma;
        for i in 0..self.z.len() {
            self.z[i] = (1.0 + ratio) * self.g_x[i] - ratio * self.g_prev[i];
            self.z[i] = self.y[i] + self.sigma * self.z[i];
        }
        project_dual_set_into(&self.z, slab, &mut self.y_next)?;

        // primal: prox step along the Lagrangian gradient
        self.problem.constraints.jacobian_apply(&self.x, &self.y_next, &mut self.grad);
        for (g, xi) in self.grad.iter_mut().zip(&self.x) {
            *g = xi - self.tau * *g;
        }
        prox_f_over_ball_into(&self.grad, self.tau, &self.problem.objective, &self.constants.ball, &mut self.x_next)?;

        // estimator reads x_k and the average before it absorbs x_{k+1}
        let rho_next = if self.opts.estimator {
            let (beta, beta_bar) = self.betas();
            let gn = self.problem.jacobian_norm(&self.x);
            let gn_bar = if beta_bar.is_finite() { self.problem.jacobian_norm(&self.x_bar) } else { 0.0 };
            improve(gn, gn_bar, beta, beta_bar, self.rho, self.est)?
        } else {
            self.rho
        };

        let weight = if self.opts.adaptive { self.sigma / self.sigma0 } else { 1.0 };
        let t_next = self.total_weight + weight;
        let keep = self.total_weight / t_next;
        let add = weight / t_next;
        for (b, xi) in self.x_bar.iter_mut().zip(&self.x_next) {
            *b = keep * *b + add * xi;
        }
        for (b, yi) in self.y_bar.iter_mut().zip(&self.y_next) {
            *b = keep * *b + add * yi;
        }
        self.total_weight = t_next;

        let (tau_next, sigma_next) = if self.opts.adaptive {
            let (t, s, _) = stepsize_update(self.tau, self.sigma, self.sigma0, rho_next);
            (t, s)
        } else {
            (self.tau, self.sigma)
        };
        let rho_hat_next = next_rho_hat(self.rho_hat, rho_next, self.k, self.tau0);

        let record = TraceRecord {
            iter,
            epoch: self.epoch,
            inner: self.k + 1,
            tau: self.tau,
            sigma: self.sigma,
            tau_next,
            sigma_next,
            weight,
            total_weight: t_next,
            rho: rho_next,
            rho_hat: rho_hat_next,
        };

        std::mem::swap(&mut self.x_prev, &mut self.x);
        std::mem::swap(&mut self.x, &mut self.x_next);
        std::mem::swap(&mut self.y, &mut self.y_next);
        std::mem::swap(&mut self.g_prev, &mut self.g_x);
        self.problem.constraints.eval(&self.x, &mut self.g_x);
        self.tau_prev = self.tau;
        self.sigma_prev = self.sigma;
        self.tau = tau_next;
        self.sigma = sigma_next;
        self.rho = rho_next;
        self.rho_hat = rho_hat_next;
        self.k += 1;

        let flow = monitor.observe(&StepView {
            record: &record,
            x: &self.x,
            x_bar: &self.x_bar,
            y: &self.y,
            y_bar: &self.y_bar,
        });
        Ok((record, flow))
    }

    /// Re-centres at `(x, y)`: zero extrapolation, empty average.
    pub fn restart_at(&mut self, x: &[f64], y: &[f64]) {
        self.x.copy_from_slice(x);
        self.x_prev.copy_from_slice(x);
        self.y.copy_from_slice(y);
        self.x_bar.copy_from_slice(x);
        self.y_bar.copy_from_slice(y);
        self.problem.constraints.eval(x, &mut self.g_x);
        self.g_prev.copy_from_slice(&self.g_x);
        self.total_weight = 0.0;
        self.k = 0;
        self.tau_prev = self.tau;
        self.sigma_prev = self.sigma;
    }
}
