//! Proximal and projection oracles used inside the solver loops.

use crate::error::{Error, Result};
use crate::linalg::{dist, norm};
use crate::problem::{Ball, BlockNormObjective};

/// Block soft-thresholding, the prox of `eta·f`:
/// `x_(i) = max(0, 1 − eta·p_i/‖v_(i)‖)·v_(i)`.
pub fn block_soft_threshold(v: &[f64], objective: &BlockNormObjective, eta: f64) -> Result<Vec<f64>> {
    if !(eta > 0.0) {
        return Err(Error::InvalidArgument(format!("prox step {eta} must be positive")));
    }
    if v.len() != objective.dim() {
        return Err(Error::InvalidArgument(format!(
            "vector has length {}, objective expects {}",
            v.len(),
            objective.dim()
        )));
    }
    let mut out = vec![0.0; v.len()];
    shrink_into(v, objective, eta, &mut out);
    Ok(out)
}

fn shrink_into(v: &[f64], objective: &BlockNormObjective, eta: f64, out: &mut [f64]) {
    for (b, p) in objective.blocks() {
        let nv = norm(&v[b.clone()]);
        let scale = if nv > 0.0 { (1.0 - eta * p / nv).max(0.0) } else { 0.0 };
        for i in b {
            out[i] = scale * v[i];
        }
    }
}

const MAX_DOUBLINGS: usize = 200;
const RADIUS_TOL: f64 = 1e-12;

/// Exact minimizer of `f(u) + ‖u − v‖²/(2·eta)` over the ball.
///
/// With a multiplier `λ ≥ 0` on the ball constraint the minimizer is the
/// block shrinkage of `w(λ) = (v/eta + λ·c)/(1/eta + λ)` with step
/// `1/(1/eta + λ)`. If the unconstrained prox lies in the ball, `λ = 0`;
/// otherwise `λ` is found by bisection on `‖u(λ) − c‖ = R`, whose left side
/// decreases in `λ`. The returned point is always on the feasible side.
pub fn prox_f_over_ball(v: &[f64], eta: f64, objective: &BlockNormObjective, ball: &Ball) -> Result<Vec<f64>> {
    let mut out = vec![0.0; v.len()];
    prox_f_over_ball_into(v, eta, objective, ball, &mut out)?;
    Ok(out)
}

pub fn prox_f_over_ball_into(
    v: &[f64],
    eta: f64,
    objective: &BlockNormObjective,
    ball: &Ball,
    out: &mut [f64],
) -> Result<()> {
    if !(eta > 0.0) {
        return Err(Error::InvalidArgument(format!("prox step {eta} must be positive")));
    }
    if !(ball.radius > 0.0) {
        return Err(Error::InvalidArgument(format!("ball radius {} must be positive", ball.radius)));
    }
    if v.len() != objective.dim() || ball.center.len() != v.len() {
        return Err(Error::InvalidArgument("prox dimensions disagree".into()));
    }
    shrink_into(v, objective, eta, out);
    if dist(out, &ball.center) <= ball.radius {
        return Ok(());
    }

    let inv_eta = 1.0 / eta;
    let mut w = vec![0.0; v.len()];
    let mut eval = |lambda: f64, out: &mut [f64]| -> f64 {
        let denom = inv_eta + lambda;
        for ((wi, vi), ci) in w.iter_mut().zip(v).zip(&ball.center) {
            *wi = (vi * inv_eta + lambda * ci) / denom;
        }
        shrink_into(&w, objective, 1.0 / denom, out);
        dist(out, &ball.center) - ball.radius
    };

    let mut lo = 0.0;
    let mut hi = inv_eta;
    let mut doublings = 0;
    while eval(hi, out) > 0.0 {
        lo = hi;
        hi *= 2.0;
        doublings += 1;
        if doublings > MAX_DOUBLINGS || !hi.is_finite() {
            return Err(Error::NumericalFailure(
                "could not bracket the ball multiplier in the constrained prox".into(),
            ));
        }
    }
    let tol = RADIUS_TOL * ball.radius.max(1.0);
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let res = eval(mid, out);
        if res > 0.0 {
            lo = mid;
        } else {
            hi = mid;
            if res >= -tol {
                break;
            }
        }
    }
    eval(hi, out);
    Ok(())
}

/// The dual set `{y ≥ 0 : lower ≤ Σ y_i ≤ upper}` with `lower = ρ/μ̲` and
/// `upper = c̄`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualSlab {
    pub lower: f64,
    pub upper: f64,
}

impl DualSlab {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if !(lower >= 0.0) || lower > upper {
            return Err(Error::InfeasibleCut { lower, upper });
        }
        Ok(Self { lower, upper })
    }

    pub fn contains(&self, y: &[f64], slack: f64) -> bool {
        let s: f64 = y.iter().sum();
        y.iter().all(|v| *v >= -slack) && s >= self.lower - slack && s <= self.upper + slack
    }
}

/// Euclidean projection onto the slab. The projection is `[u − ν·1]_+` for
/// the scalar shift `ν` that puts the sum back into `[lower, upper]` (or
/// `ν = 0` when it is already there); `ν` is found exactly by sorting.
pub fn project_dual_set(u: &[f64], slab: DualSlab) -> Result<Vec<f64>> {
    let mut out = vec![0.0; u.len()];
    project_dual_set_into(u, slab, &mut out)?;
    Ok(out)
}

pub fn project_dual_set_into(u: &[f64], slab: DualSlab, out: &mut [f64]) -> Result<()> {
    if slab.lower > slab.upper || !(slab.lower >= 0.0) {
        return Err(Error::InfeasibleCut { lower: slab.lower, upper: slab.upper });
    }
    if u.is_empty() {
        return Err(Error::InvalidArgument("empty dual vector".into()));
    }
    let s0: f64 = u.iter().map(|v| v.max(0.0)).sum();
    let nu = if s0 > slab.upper {
        shift_for_sum(u, slab.upper)
    } else if s0 < slab.lower {
        shift_for_sum(u, slab.lower)
    } else {
        0.0
    };
    for (o, ui) in out.iter_mut().zip(u) {
        *o = (ui - nu).max(0.0);
    }
    Ok(())
}

/// Shift `ν` with `Σ_i [u_i − ν]_+ = target`.
fn shift_for_sum(u: &[f64], target: f64) -> f64 {
    let mut sorted = u.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    if target <= 0.0 {
        return sorted[0];
    }
    let mut prefix = 0.0;
    for k in 0..sorted.len() {
        prefix += sorted[k];
        let nu = (prefix - target) / (k + 1) as f64;
        let next = sorted.get(k + 1).copied().unwrap_or(f64::NEG_INFINITY);
        if nu >= next {
            return nu;
        }
    }
    unreachable!("the last candidate always satisfies the bracket")
}
