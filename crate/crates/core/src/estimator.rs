//! Progressive estimation of the Lagrangian's strong convexity.
//!
//! Both bounds below are lower bounds on `‖y*‖₁` computed from an iterate
//! `x̂` near the optimum. Multiplied by `μ̲` they give `ρ`, a certified lower
//! bound on `(y*)ᵀμ`, which the solvers use to cut the dual set away from the
//! origin and to shrink the primal step.

use crate::error::{Error, Result};

/// Lower bound on `‖y*‖₁` valid whenever `‖x̂ − x*‖² ≤ 2β`:
/// `r / (‖∇G(x̂)‖ + L_X √(2β))`.
pub fn h1(grad_norm: f64, beta: f64, r: f64, l_x: f64) -> Result<f64> {
    if beta.is_infinite() {
        return Ok(0.0);
    }
    let denom = grad_norm + l_x * (2.0 * beta).sqrt();
    if !(denom > 0.0) || !(r > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "h1 needs r > 0 and a positive denominator (r = {r}, denominator = {denom})"
        )));
    }
    Ok(r / denom)
}

/// Lower bound on `‖y*‖₁` valid whenever `(y*)ᵀμ·‖x̂ − x*‖² ≤ 2β`:
/// `[(L_X/r)√(β/(2μ̲)) + √(L_X²β/(2μ̲r²) + ‖∇G(x̂)‖/r)]⁻²`.
pub fn h2(grad_norm: f64, beta: f64, r: f64, l_x: f64, mu_lb: f64) -> Result<f64> {
    if !(r > 0.0 && mu_lb > 0.0) {
        return Err(Error::InvalidArgument(format!("h2 needs r > 0 and mu > 0 (r = {r}, mu = {mu_lb})")));
    }
    if beta.is_infinite() {
        return Ok(0.0);
    }
    let a = l_x / r * (beta / (2.0 * mu_lb)).sqrt();
    let b = (l_x * l_x * beta / (2.0 * mu_lb * r * r) + grad_norm / r).sqrt();
    let s = a + b;
    if !(s > 0.0) {
        return Err(Error::InvalidArgument("h2 denominator vanishes".into()));
    }
    Ok(1.0 / (s * s))
}

/// Problem constants the estimator reads.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorConstants {
    pub r: f64,
    pub l_x: f64,
    pub mu_lb: f64,
}

/// `ρ_new = max(ρ_old, μ̲·max(h1(x, β), h2(x̄, β̄)))`.
///
/// An infinite `beta_bar` (no averaged weight yet) switches the second
/// bound off.
pub fn improve(
    grad_norm_at_x: f64,
    grad_norm_at_xbar: f64,
    beta: f64,
    beta_bar: f64,
    rho_old: f64,
    c: EstimatorConstants,
) -> Result<f64> {
    let b1 = h1(grad_norm_at_x, beta, c.r, c.l_x)?;
    let b2 = h2(grad_norm_at_xbar, beta_bar, c.r, c.l_x, c.mu_lb)?;
    Ok(rho_old.max(c.mu_lb * b1.max(b2)))
}

/// Rate coefficient recursion. `k` is the index of `rho_hat` (the current
/// value); the result is the value at index `k + 1`, given `ρ_{k+1}`:
///
/// * `k = 0`: `ρ̂₁ = 3√(ρ₁/τ₀)` (the incoming `rho_hat` is ignored)
/// * `k ≥ 1`: `ρ̂_{k+1} = √(ρ̂_k²k² + 3ρ_{k+1}ρ̂_k·k) / (k + 1)`
pub fn next_rho_hat(rho_hat: f64, rho_next: f64, k: usize, tau0: f64) -> f64 {
    if k == 0 {
        return 3.0 * (rho_next / tau0).sqrt();
    }
    let kf = k as f64;
    (rho_hat * rho_hat * kf * kf + 3.0 * rho_next * rho_hat * kf).sqrt() / (kf + 1.0)
}

/// Running strong-convexity state owned by one solver run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhoEstimate {
    pub rho: f64,
    pub rho_hat: f64,
    pub k: usize,
}

impl RhoEstimate {
    pub fn new(rho0: f64) -> Self {
        Self { rho: rho0, rho_hat: 0.0, k: 0 }
    }

    /// `ρ̃_k = 2 Σ_{s≤k} ρ̂_s·s / (k(k+1))` from a recorded `ρ̂` history
    /// (`history[s] = ρ̂_s`).
    pub fn averaged(history: &[f64]) -> f64 {
        let k = history.len().saturating_sub(1);
        if k == 0 {
            return 0.0;
        }
        let s: f64 = history.iter().enumerate().map(|(i, r)| r * i as f64).sum();
        2.0 * s / (k as f64 * (k as f64 + 1.0))
    }
}
