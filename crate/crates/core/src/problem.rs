//! Problem description shared by every solver.
//!
//! An instance is `min f(x) s.t. g_i(x) ≤ 0` with `f` a block-separable
//! weighted Euclidean norm and each `g_i` strongly convex. The helpers here
//! derive the constants the solvers need: the dual ℓ1 bound `c̄`, the
//! primal ball `𝒳 = B(x̃, R)` that contains the optimum, the diameters of
//! both domains, and the coupled smoothness constant `L_XY = c̄·L_X`.

use std::fmt;
use std::ops::Range;
use std::sync::Arc;

use crate::error::{check_len, Error, Result};
use crate::linalg::{self, axpy, dot, norm, SymmetricOperator};

/// `f(x) = Σ_i p_i ‖x_(i)‖` over a partition of the coordinates into blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockNormObjective {
    blocks: Vec<Range<usize>>,
    weights: Vec<f64>,
    dim: usize,
}

impl BlockNormObjective {
    /// Weighted ℓ1 norm: one block per coordinate.
    pub fn weighted_l1(weights: Vec<f64>) -> Result<Self> {
        let blocks = (0..weights.len()).map(|i| i..i + 1).collect();
        Self::new(blocks, weights)
    }

    pub fn l1(n: usize) -> Self {
        Self::weighted_l1(vec![1.0; n]).expect("unit weights are valid")
    }

    /// Blocks given as `(start, len)` pairs. They must tile `0..n` exactly;
    /// order does not matter.
    pub fn from_blocks(blocks: &[(usize, usize)], weights: Vec<f64>) -> Result<Self> {
        let ranges = blocks.iter().map(|&(s, l)| s..s + l).collect();
        Self::new(ranges, weights)
    }

    fn new(mut blocks: Vec<Range<usize>>, weights: Vec<f64>) -> Result<Self> {
        if blocks.len() != weights.len() {
            return Err(Error::InvalidArgument(format!("{} blocks but {} weights", blocks.len(), weights.len())));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return Err(Error::InvalidArgument(format!("block weight {w} is not a nonnegative number")));
        }
        let mut order: Vec<usize> = (0..blocks.len()).collect();
        order.sort_by_key(|&i| blocks[i].start);
        let mut next = 0;
        for &i in &order {
            let b = &blocks[i];
            if b.is_empty() || b.start != next {
                return Err(Error::InvalidArgument(format!(
                    "blocks do not partition the coordinates (block {}..{} after {})",
                    b.start, b.end, next
                )));
            }
            next = b.end;
        }
        let weights = order.iter().map(|&i| weights[i]).collect();
        blocks = order.iter().map(|&i| blocks[i].clone()).collect();
        Ok(Self { blocks, weights, dim: next })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> impl Iterator<Item = (Range<usize>, f64)> + '_ {
        self.blocks.iter().cloned().zip(self.weights.iter().copied())
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.blocks().map(|(b, p)| p * norm(&x[b])).sum()
    }

    /// Minimum of `f`, which is `f(0) = 0` for nonnegative weights.
    pub fn min_value(&self) -> f64 {
        0.0
    }
}

/// The constraint map `G = (g_1, …, g_m)` together with its Jacobian.
///
/// `∇G(x)` is the `n × m` matrix whose columns are the gradients `∇g_i(x)`.
pub trait ConstraintMap: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;
    fn count(&self) -> usize;
    fn eval(&self, x: &[f64], out: &mut [f64]);
    fn gradient(&self, i: usize, x: &[f64], out: &mut [f64]);

    /// `out = ∇G(x) y`
    fn jacobian_apply(&self, x: &[f64], y: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        let mut g = vec![0.0; self.dim()];
        for (i, &yi) in y.iter().enumerate() {
            if yi != 0.0 {
                self.gradient(i, x, &mut g);
                axpy(yi, &g, out);
            }
        }
    }

    /// Unconstrained minimizer of each `g_i`, when the map knows how to
    /// compute it.
    fn minimizers(&self) -> Option<Result<Vec<Vec<f64>>>> {
        None
    }
}

/// `g(x) = ½ xᵀQx + cᵀx + d`
#[derive(Debug, Clone)]
pub struct QuadraticConstraint {
    pub hessian: Arc<dyn SymmetricOperator>,
    pub linear: Vec<f64>,
    pub constant: f64,
}

impl QuadraticConstraint {
    pub fn new(hessian: Arc<dyn SymmetricOperator>, linear: Vec<f64>, constant: f64) -> Result<Self> {
        check_len("linear term", linear.len(), hessian.dim())?;
        Ok(Self { hessian, linear, constant })
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        0.5 * self.hessian.quad_form(x) + dot(&self.linear, x) + self.constant
    }

    pub fn gradient(&self, x: &[f64], out: &mut [f64]) {
        self.hessian.apply(x, out);
        axpy(1.0, &self.linear, out);
    }

    /// Solves `Qx = −c` by conjugate gradients.
    pub fn minimizer(&self) -> Result<Vec<f64>> {
        let rhs: Vec<f64> = self.linear.iter().map(|c| -c).collect();
        let n = self.hessian.dim();
        linalg::conjugate_gradient(self.hessian.as_ref(), &rhs, 1e-13, 20 * n + 200)
    }
}

#[derive(Debug, Clone)]
pub struct QuadraticConstraints {
    terms: Vec<QuadraticConstraint>,
    dim: usize,
}

impl QuadraticConstraints {
    pub fn new(terms: Vec<QuadraticConstraint>) -> Result<Self> {
        let dim = terms
            .first()
            .ok_or_else(|| Error::InvalidArgument("at least one constraint is required".into()))?
            .hessian
            .dim();
        for t in &terms {
            check_len("constraint", t.hessian.dim(), dim)?;
        }
        Ok(Self { terms, dim })
    }

    pub fn terms(&self) -> &[QuadraticConstraint] {
        &self.terms
    }

    /// Upper bound on `sup_{x ∈ B(center, radius)} ‖∇G(x)‖` from
    /// `‖∇g_i(x)‖ ≤ ‖∇g_i(center)‖ + ‖Q_i‖·radius`, combined over constraints
    /// in Frobenius fashion. `hessian_norms[i]` must bound `‖Q_i‖`.
    pub fn lipschitz_bound(&self, center: &[f64], radius: f64, hessian_norms: &[f64]) -> f64 {
        let mut g = vec![0.0; self.dim];
        self.terms
            .iter()
            .zip(hessian_norms)
            .map(|(t, q)| {
                t.gradient(center, &mut g);
                let b = norm(&g) + q * radius;
                b * b
            })
            .sum::<f64>()
            .sqrt()
    }
}

impl ConstraintMap for QuadraticConstraints {
    fn dim(&self) -> usize {
        self.dim
    }

    fn count(&self) -> usize {
        self.terms.len()
    }

    fn eval(&self, x: &[f64], out: &mut [f64]) {
        for (o, t) in out.iter_mut().zip(&self.terms) {
            *o = t.eval(x);
        }
    }

    fn gradient(&self, i: usize, x: &[f64], out: &mut [f64]) {
        self.terms[i].gradient(x, out);
    }

    fn minimizers(&self) -> Option<Result<Vec<Vec<f64>>>> {
        Some(self.terms.iter().map(QuadraticConstraint::minimizer).collect())
    }
}

/// A constrained instance with the problem-level constants the solvers need.
#[derive(Debug, Clone)]
pub struct ConstrainedProblem {
    pub objective: BlockNormObjective,
    pub constraints: Arc<dyn ConstraintMap>,
    /// Strong-convexity modulus of each `g_i`.
    pub mu: Vec<f64>,
    /// Lipschitz constant of `∇G` on the primal ball.
    pub l_x: f64,
    /// Lipschitz constant of `G` on the primal ball.
    pub l_g: f64,
    /// Lower bound on `dist(∂f(x*), 0)`.
    pub r: f64,
    pub strict_point: Vec<f64>,
}

impl ConstrainedProblem {
    pub fn new(
        objective: BlockNormObjective,
        constraints: Arc<dyn ConstraintMap>,
        mu: Vec<f64>,
        l_x: f64,
        l_g: f64,
        r: f64,
        strict_point: Vec<f64>,
    ) -> Result<Self> {
        let n = objective.dim();
        check_len("constraint map", constraints.dim(), n)?;
        check_len("strict point", strict_point.len(), n)?;
        check_len("mu", mu.len(), constraints.count())?;
        if let Some(m) = mu.iter().find(|m| !(**m > 0.0 && m.is_finite())) {
            return Err(Error::InvalidArgument(format!("strong convexity modulus {m} must be positive")));
        }
        for (name, v) in [("L_X", l_x), ("L_G", l_g), ("r", r)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidArgument(format!("{name} = {v} must be positive")));
            }
        }
        let p = Self { objective, constraints, mu, l_x, l_g, r, strict_point };
        let g = p.constraint_values(&p.strict_point);
        if let Some((index, &value)) = g.iter().enumerate().find(|(_, v)| **v >= 0.0) {
            return Err(Error::NotStrictlyFeasible { index, value });
        }
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        self.objective.dim()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.count()
    }

    pub fn mu_min(&self) -> f64 {
        self.mu.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn mu_max(&self) -> f64 {
        self.mu.iter().copied().fold(0.0, f64::max)
    }

    pub fn constraint_values(&self, x: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.num_constraints()];
        self.constraints.eval(x, &mut g);
        g
    }

    /// `‖[G(x)]_+‖`
    pub fn feasibility_violation(&self, x: &[f64]) -> f64 {
        self.constraint_values(x).iter().map(|g| g.max(0.0).powi(2)).sum::<f64>().sqrt()
    }

    /// Operator norm `‖∇G(x)‖`. Exact for one constraint; for several it is
    /// the square root of the top eigenvalue of the `m × m` Gram matrix of the
    /// gradients, found by power iteration.
    pub fn jacobian_norm(&self, x: &[f64]) -> f64 {
        let n = self.dim();
        let m = self.num_constraints();
        let mut grads = vec![vec![0.0; n]; m];
        for (i, g) in grads.iter_mut().enumerate() {
            self.constraints.gradient(i, x, g);
        }
        if m == 1 {
            return norm(&grads[0]);
        }
        let gram: Vec<f64> = (0..m * m).map(|k| dot(&grads[k / m], &grads[k % m])).collect();
        let top = linalg::power_iteration(
            m,
            |v, out| {
                for (i, o) in out.iter_mut().enumerate() {
                    *o = dot(&gram[i * m..(i + 1) * m], v);
                }
            },
            1e-8,
            500,
            0x9e37_79b9,
        );
        match top {
            Ok(e) => (e.value + e.residual).max(0.0).sqrt(),
            // Frobenius norm bounds the operator norm from above.
            Err(_) => (0..m).map(|i| gram[i * m + i]).sum::<f64>().sqrt(),
        }
    }

    /// `f(x) + ⟨y, G(x)⟩`
    pub fn lagrangian(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        check_len("x", x.len(), self.dim())?;
        check_len("y", y.len(), self.num_constraints())?;
        Ok(self.objective.eval(x) + dot(y, &self.constraint_values(x)))
    }

    /// Whether `g_i(0) > 0` for some `i`, i.e. the minimizer of the norm
    /// objective is infeasible. Reported, not enforced.
    pub fn origin_infeasible(&self) -> bool {
        self.constraint_values(&vec![0.0; self.dim()]).iter().any(|g| *g > 0.0)
    }
}

/// `c̄ = (f(x̃) − min f) / min_i(−g_i(x̃))`; every dual optimum has
/// `‖y*‖₁ ≤ c̄`.
pub fn dual_radius_bound(problem: &ConstrainedProblem) -> Result<f64> {
    let g = problem.constraint_values(&problem.strict_point);
    let mut margin = f64::INFINITY;
    for (index, &value) in g.iter().enumerate() {
        if value >= 0.0 {
            return Err(Error::NotStrictlyFeasible { index, value });
        }
        margin = margin.min(-value);
    }
    let gap = problem.objective.eval(&problem.strict_point) - problem.objective.min_value();
    Ok(gap.max(0.0) / margin)
}

/// Closed ball `B(center, radius)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Ball {
    pub fn contains(&self, x: &[f64], slack: f64) -> bool {
        linalg::dist(x, &self.center) <= self.radius + slack
    }

    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        let d = linalg::dist(x, &self.center);
        if d <= self.radius {
            return x.to_vec();
        }
        let s = self.radius / d;
        x.iter().zip(&self.center).map(|(xi, ci)| ci + s * (xi - ci)).collect()
    }
}

/// Ball centered at the strict point with radius `min_i 2√(−2 g_i(x_i*)/μ_i)`,
/// where `x_i*` minimizes `g_i`. The optimum lies in its interior.
pub fn feasible_ball(problem: &ConstrainedProblem, minimizers: &[Vec<f64>]) -> Result<Ball> {
    check_len("minimizers", minimizers.len(), problem.num_constraints())?;
    let mut g = vec![0.0; problem.num_constraints()];
    let mut radius = f64::INFINITY;
    for (i, xi) in minimizers.iter().enumerate() {
        check_len("minimizer", xi.len(), problem.dim())?;
        problem.constraints.eval(xi, &mut g);
        if g[i] >= 0.0 {
            return Err(Error::InfeasibleConstraint { index: i, value: g[i] });
        }
        radius = radius.min(2.0 * (-2.0 * g[i] / problem.mu[i]).sqrt());
    }
    Ok(Ball { center: problem.strict_point.clone(), radius })
}

/// [`feasible_ball`] using the minimizers the constraint map computes itself.
pub fn feasible_ball_auto(problem: &ConstrainedProblem) -> Result<Ball> {
    let minimizers = problem
        .constraints
        .minimizers()
        .ok_or_else(|| Error::InvalidArgument("constraint map cannot compute its minimizers; supply them".into()))??;
    feasible_ball(problem, &minimizers)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemConstants {
    pub c_bar: f64,
    pub ball: Ball,
    pub d_x: f64,
    pub d_y: f64,
    pub l_xy: f64,
    pub mu_lb: f64,
}

/// Derived constants. `D_Y` is the exact diameter of
/// `𝒴 = {y ≥ 0 : ‖y‖₁ ≤ c̄}`: `c̄` for one constraint, `√2·c̄` otherwise.
pub fn derive_constants(problem: &ConstrainedProblem, ball: Ball) -> Result<ProblemConstants> {
    let c_bar = dual_radius_bound(problem)?;
    if !(ball.radius > 0.0) {
        return Err(Error::InvalidArgument(format!("ball radius {} must be positive", ball.radius)));
    }
    let d_y = if problem.num_constraints() == 1 { c_bar } else { std::f64::consts::SQRT_2 * c_bar };
    Ok(ProblemConstants {
        c_bar,
        d_x: 2.0 * ball.radius,
        d_y,
        l_xy: c_bar * problem.l_x,
        mu_lb: problem.mu_min(),
        ball,
    })
}

/// Convenience: ball from the constraint map's own minimizers, then constants.
pub fn constants_for(problem: &ConstrainedProblem) -> Result<ProblemConstants> {
    derive_constants(problem, feasible_ball_auto(problem)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct KktResidual {
    pub stationarity: f64,
    pub complementarity: f64,
    pub primal_violation: f64,
    pub dual_violation: f64,
}

impl KktResidual {
    pub fn max(&self) -> f64 {
        self.stationarity.max(self.complementarity).max(self.primal_violation).max(self.dual_violation)
    }
}

/// KKT diagnostics at `(x, y)`. Stationarity is the distance from zero to
/// `∂f(x) + ∇G(x)y`, evaluated blockwise in closed form.
pub fn kkt_residual(problem: &ConstrainedProblem, x: &[f64], y: &[f64]) -> Result<KktResidual> {
    check_len("x", x.len(), problem.dim())?;
    check_len("y", y.len(), problem.num_constraints())?;
    let mut grad = vec![0.0; problem.dim()];
    problem.constraints.jacobian_apply(x, y, &mut grad);
    let mut stat_sq = 0.0;
    for (b, p) in problem.objective.blocks() {
        let xb = &x[b.clone()];
        let gb = &grad[b];
        let nx = norm(xb);
        let d = if nx > 0.0 {
            xb.iter().zip(gb).map(|(xi, gi)| (p * xi / nx + gi).powi(2)).sum::<f64>().sqrt()
        } else {
            (norm(gb) - p).max(0.0)
        };
        stat_sq += d * d;
    }
    let g = problem.constraint_values(x);
    Ok(KktResidual {
        stationarity: stat_sq.sqrt(),
        complementarity: dot(y, &g).abs(),
        primal_violation: g.iter().map(|v| v.max(0.0).powi(2)).sum::<f64>().sqrt(),
        dual_violation: y.iter().map(|v| (-v).max(0.0).powi(2)).sum::<f64>().sqrt(),
    })
}
