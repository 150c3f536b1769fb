use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{self, SymmetricOperator};
use crate::problem::{
    derive_constants, feasible_ball, BlockNormObjective, ConstrainedProblem, ProblemConstants, QuadraticConstraint,
    QuadraticConstraints,
};

use super::graph::Graph;

/// `Q = I − (1−α)/2 · (I + D^{−1/2} A D^{−1/2})`, applied through the
/// adjacency structure.
#[derive(Debug, Clone)]
pub struct PprOperator {
    graph: Arc<Graph>,
    alpha: f64,
    inv_sqrt_deg: Vec<f64>,
}

impl PprOperator {
    pub fn new(graph: Arc<Graph>, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidArgument(format!("alpha = {alpha} must lie in (0, 1)")));
        }
        let inv_sqrt_deg = graph.degrees().iter().map(|d| 1.0 / d.sqrt()).collect();
        Ok(Self { graph, alpha, inv_sqrt_deg })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn inv_sqrt_degrees(&self) -> &[f64] {
        &self.inv_sqrt_deg
    }

    /// Dense copy, for tests and tiny graphs.
    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.graph.len();
        let c = 0.5 * (1.0 - self.alpha);
        let mut q = vec![0.0; n * n];
        for i in 0..n {
            q[i * n + i] = 1.0 - c;
            for &j in self.graph.neighbors(i) {
                q[i * n + j] = -c * self.inv_sqrt_deg[i] * self.inv_sqrt_deg[j];
            }
        }
        q
    }
}

impl SymmetricOperator for PprOperator {
    fn dim(&self) -> usize {
        self.graph.len()
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        let c = 0.5 * (1.0 - self.alpha);
        for (i, o) in out.iter_mut().enumerate() {
            let s: f64 = self.graph.neighbors(i).iter().map(|&j| self.inv_sqrt_deg[j] * x[j]).sum();
            *o = x[i] - c * (x[i] + self.inv_sqrt_deg[i] * s);
        }
    }
}

/// Teleport distribution `s`.
#[derive(Debug, Clone, PartialEq)]
pub enum Teleport {
    Uniform,
    /// Uniform over the listed seed nodes.
    Seeds(Vec<usize>),
    Vector(Vec<f64>),
}

impl Teleport {
    pub fn vector(&self, n: usize) -> Result<Vec<f64>> {
        match self {
            Teleport::Uniform => Ok(vec![1.0 / n as f64; n]),
            Teleport::Seeds(seeds) => {
                if seeds.is_empty() {
                    return Err(Error::InvalidArgument("seed set is empty".into()));
                }
                let mut s = vec![0.0; n];
                for &k in seeds {
                    if k >= n {
                        return Err(Error::InvalidArgument(format!("seed node {k} out of range")));
                    }
                    s[k] = 1.0;
                }
                let total: f64 = s.iter().sum();
                Ok(s.into_iter().map(|v| v / total).collect())
            }
            Teleport::Vector(v) => {
                if v.len() != n {
                    return Err(Error::InvalidArgument(format!("teleport vector has {} entries, need {n}", v.len())));
                }
                let total: f64 = v.iter().sum();
                if v.iter().any(|x| *x < 0.0) || (total - 1.0).abs() > 1e-9 {
                    return Err(Error::InvalidArgument("teleport vector must lie on the simplex".into()));
                }
                Ok(v.clone())
            }
        }
    }
}

impl FromStr for Teleport {
    type Err = Error;

    /// `uniform` or `seed:i[,j,...]`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "uniform" {
            return Ok(Teleport::Uniform);
        }
        if let Some(rest) = s.strip_prefix("seed:") {
            let seeds = rest
                .split(',')
                .map(|w| w.trim().parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| Error::InvalidArgument(format!("bad seed list '{rest}'")))?;
            return Ok(Teleport::Seeds(seeds));
        }
        Err(Error::InvalidArgument(format!("teleport must be 'uniform' or 'seed:<ids>', got '{s}'")))
    }
}

/// How `r`, the lower bound on `dist(∂f(x*), 0)`, is set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RadiusRule {
    /// `min_i d_i`
    #[default]
    MinDegree,
    /// `min_i √d_i`
    MinSqrtDegree,
}

impl FromStr for RadiusRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "min_degree" => Ok(RadiusRule::MinDegree),
            "min_sqrt_degree" => Ok(RadiusRule::MinSqrtDegree),
            other => Err(Error::InvalidArgument(format!("unknown r rule '{other}'"))),
        }
    }
}

/// Constrained personalized PageRank:
/// `min ‖D^{1/2}x‖₁  s.t.  ½xᵀQx − α sᵀD^{−1/2}x ≤ b`.
#[derive(Debug, Clone)]
pub struct PprInstance {
    pub problem: ConstrainedProblem,
    pub constants: ProblemConstants,
    pub operator: Arc<PprOperator>,
    pub teleport: Vec<f64>,
    pub alpha: f64,
    pub b: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
}

const SPECTRAL_TOL: f64 = 1e-10;
const SPECTRAL_MAX_ITERS: usize = 100_000;

/// `(λ_min(Q), λ_max(Q))` by power iteration, rounded outward, and clipped to
/// the interval `[α, 1]` that always contains the spectrum.
pub fn spectral_bounds(op: &PprOperator) -> Result<(f64, f64)> {
    let (lo, hi) = linalg::spectral_bounds(op, SPECTRAL_TOL, SPECTRAL_MAX_ITERS)?;
    Ok((lo.max(op.alpha), hi.min(1.0)))
}

pub fn build_ppr_problem(
    graph: Arc<Graph>,
    alpha: f64,
    b: f64,
    teleport: &Teleport,
    radius_rule: RadiusRule,
) -> Result<PprInstance> {
    let n = graph.len();
    let op = Arc::new(PprOperator::new(graph.clone(), alpha)?);
    let s = teleport.vector(n)?;
    let linear: Vec<f64> = s.iter().zip(op.inv_sqrt_degrees()).map(|(si, w)| -alpha * si * w).collect();
    let term = QuadraticConstraint::new(op.clone(), linear, -b)?;

    // x̃ = argmin g: Qx = α D^{−1/2} s
    let strict = term.minimizer()?;
    let g_strict = term.eval(&strict);
    if !(g_strict < 0.0) {
        return Err(Error::TargetUnattainable(g_strict));
    }

    // The spectrum of Q always lies in [α, 1]; fall back to it if power
    // iteration does not settle.
    let (lambda_min, lambda_max) = spectral_bounds(&op).unwrap_or((alpha, 1.0));

    let degrees = graph.degrees();
    let r = match radius_rule {
        RadiusRule::MinDegree => degrees.iter().cloned().fold(f64::INFINITY, f64::min),
        RadiusRule::MinSqrtDegree => degrees.iter().map(|d| d.sqrt()).fold(f64::INFINITY, f64::min),
    };
    let objective = BlockNormObjective::weighted_l1(degrees.iter().map(|d| d.sqrt()).collect())?;
    let constraints = QuadraticConstraints::new(vec![term])?;
    let radius = 2.0 * (-2.0 * g_strict / lambda_min).sqrt();
    let l_g = constraints.lipschitz_bound(&strict, radius, &[lambda_max]);
    let problem = ConstrainedProblem::new(
        objective,
        Arc::new(constraints),
        vec![lambda_min],
        lambda_max,
        l_g,
        r,
        strict.clone(),
    )?;
    let ball = feasible_ball(&problem, &[strict])?;
    let constants = derive_constants(&problem, ball)?;
    Ok(PprInstance { problem, constants, operator: op, teleport: s, alpha, b, lambda_min, lambda_max })
}
