use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{dot, ScaledIdentity};
use crate::problem::{
    derive_constants, feasible_ball, BlockNormObjective, ConstrainedProblem, ProblemConstants, QuadraticConstraint,
    QuadraticConstraints,
};

/// Known-solution instance `min ‖x‖₁ s.t. ½‖x − c‖² ≤ R₀²` with its KKT pair.
#[derive(Debug, Clone)]
pub struct SyntheticInstance {
    pub problem: ConstrainedProblem,
    pub constants: ProblemConstants,
    pub x_star: Vec<f64>,
    pub y_star: Vec<f64>,
    pub f_star: f64,
}

/// Builds the instance and solves it through its one-parameter KKT family
/// `x(y) = soft_threshold(c, 1/y)`, bisecting on `y` until the constraint is
/// tight. Rejects centers with `g(0) ≤ 0`, where the constraint is inactive.
pub fn make_synthetic_instance(center: &[f64], level: f64) -> Result<SyntheticInstance> {
    let n = center.len();
    if n == 0 || !(level > 0.0 && level.is_finite()) {
        return Err(Error::InvalidArgument("need a nonempty center and a positive level".into()));
    }
    let half_sq = 0.5 * dot(center, center);
    let r0_sq = level * level;
    let g0 = half_sq - r0_sq;
    if !(g0 > 0.0) {
        return Err(Error::InactiveConstraint(g0));
    }
    let term =
        QuadraticConstraint::new(Arc::new(ScaledIdentity { n, scale: 1.0 }), center.iter().map(|c| -c).collect(), g0)?;
    let constraints = QuadraticConstraints::new(vec![term])?;
    // ball radius 2√(2R₀²) bounds ‖x − c‖ on the ball
    let radius = 2.0 * (2.0 * r0_sq).sqrt();
    let problem = ConstrainedProblem::new(
        BlockNormObjective::l1(n),
        Arc::new(constraints),
        vec![1.0],
        1.0,
        radius,
        1.0,
        center.to_vec(),
    )?;
    let ball = feasible_ball(&problem, &[center.to_vec()])?;
    let constants = derive_constants(&problem, ball)?;

    // ‖x(y) − c‖² = Σ min(|c_i|, 1/y)² decreases in y; find where it is 2R₀².
    let excess = |y: f64| center.iter().map(|c| c.abs().min(1.0 / y).powi(2)).sum::<f64>() - 2.0 * r0_sq;
    let c_max = center.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let mut lo = 1.0 / c_max;
    let mut hi = 2.0 * (n as f64 / (2.0 * r0_sq)).sqrt().max(lo);
    while excess(hi) > 0.0 {
        hi *= 2.0;
    }
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if excess(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let y = 0.5 * (lo + hi);
    let x_star: Vec<f64> = center.iter().map(|&c| c.signum() * (c.abs() - 1.0 / y).max(0.0)).collect();
    let f_star = problem.objective.eval(&x_star);
    Ok(SyntheticInstance { problem, constants, x_star, y_star: vec![y], f_star })
}

/// `c = 2`, `R₀ = 1`: `x* = 2 − √2`, `y* = 1/√2`.
pub fn canonical_instance() -> SyntheticInstance {
    make_synthetic_instance(&[2.0], 1.0).expect("canonical instance is well posed")
}
