//! Small dense-vector kernels and symmetric operators.
//!
//! Vectors are plain `[f64]` slices. Operators are applied matrix-free so
//! sparse graph matrices and dense test matrices share one interface.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

pub fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    let d = dist(a, b);
    d * d
}

/// `y += alpha * x`
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Symmetric linear operator applied matrix-free.
pub trait SymmetricOperator: Send + Sync + std::fmt::Debug {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], out: &mut [f64]);

    fn quad_form(&self, x: &[f64]) -> f64 {
        let mut qx = vec![0.0; self.dim()];
        self.apply(x, &mut qx);
        dot(x, &qx)
    }
}

/// Row-major dense symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseSymmetric {
    n: usize,
    data: Vec<f64>,
}

impl DenseSymmetric {
    pub fn new(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::InvalidArgument(format!("dense matrix needs {} entries, got {}", n * n, data.len())));
        }
        for i in 0..n {
            for j in 0..i {
                let (a, b) = (data[i * n + j], data[j * n + i]);
                if (a - b).abs() > 1e-12 * (1.0 + a.abs().max(b.abs())) {
                    return Err(Error::InvalidArgument(format!("matrix is not symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(Self { n, data })
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Self { n, data }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }
}

impl SymmetricOperator for DenseSymmetric {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = dot(&self.data[i * self.n..(i + 1) * self.n], x);
        }
    }
}

/// `scale * I`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledIdentity {
    pub n: usize,
    pub scale: f64,
}

impl SymmetricOperator for ScaledIdentity {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        for (o, xi) in out.iter_mut().zip(x) {
            *o = self.scale * xi;
        }
    }
}

/// Solves `A x = b` for symmetric positive definite `A`, starting from zero.
///
/// Stops when `‖Ax − b‖ ≤ tol · ‖b‖`.
pub fn conjugate_gradient(op: &dyn SymmetricOperator, b: &[f64], tol: f64, max_iters: usize) -> Result<Vec<f64>> {
    let n = op.dim();
    let mut x = vec![0.0; n];
    let b_norm = norm(b);
    if b_norm == 0.0 {
        return Ok(x);
    }
    let mut r = b.to_vec();
    let mut p = r.clone();
    let mut ap = vec![0.0; n];
    let mut rr = dot(&r, &r);
    for _ in 0..max_iters {
        if rr.sqrt() <= tol * b_norm {
            return Ok(x);
        }
        op.apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            return Err(Error::NumericalFailure("conjugate gradient met a non-positive curvature direction".into()));
        }
        let alpha = rr / pap;
        axpy(alpha, &p, &mut x);
        axpy(-alpha, &ap, &mut r);
        let rr_next = dot(&r, &r);
        let beta = rr_next / rr;
        for (pi, ri) in p.iter_mut().zip(&r) {
            *pi = ri + beta * *pi;
        }
        rr = rr_next;
    }
    // Recompute the true residual; the recursive one drifts.
    op.apply(&x, &mut ap);
    let res = ap.iter().zip(b).map(|(a, bi)| (a - bi).powi(2)).sum::<f64>().sqrt();
    if res <= tol * b_norm * 10.0 {
        Ok(x)
    } else {
        Err(Error::NumericalFailure(format!("conjugate gradient stalled at relative residual {:.3e}", res / b_norm)))
    }
}

/// Result of a symmetric power iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigen {
    /// Rayleigh quotient at the final vector.
    pub value: f64,
    /// `‖Av − value·v‖` for the unit final vector; some eigenvalue lies
    /// within this distance of `value`.
    pub residual: f64,
    pub iterations: usize,
}

/// Dominant eigenvalue of a symmetric positive semidefinite operator given by
/// `apply`. The start vector is drawn from a fixed-seed generator so runs are
/// reproducible.
pub fn power_iteration<F>(n: usize, mut apply: F, tol: f64, max_iters: usize, seed: u64) -> Result<Eigen>
where
    F: FnMut(&[f64], &mut [f64]),
{
    if n == 0 {
        return Err(Error::InvalidArgument("power iteration on an empty operator".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..1.5)).collect();
    let nv = norm(&v);
    v.iter_mut().for_each(|vi| *vi /= nv);
    let mut av = vec![0.0; n];
    for it in 1..=max_iters {
        apply(&v, &mut av);
        let value = dot(&v, &av);
        let residual = av.iter().zip(&v).map(|(a, b)| (a - value * b).powi(2)).sum::<f64>().sqrt();
        let scale = value.abs().max(1e-300);
        if residual <= tol * scale {
            return Ok(Eigen { value, residual, iterations: it });
        }
        let na = norm(&av);
        if na == 0.0 {
            return Ok(Eigen { value: 0.0, residual: 0.0, iterations: it });
        }
        for (vi, ai) in v.iter_mut().zip(&av) {
            *vi = ai / na;
        }
    }
    Err(Error::NumericalFailure(format!("power iteration did not converge in {max_iters} iterations")))
}

/// Extreme eigenvalues `(λ_min, λ_max)` of a symmetric positive definite
/// operator, rounded outward so that `λ_min` never overestimates and `λ_max`
/// never underestimates the true values.
pub fn spectral_bounds(op: &dyn SymmetricOperator, tol: f64, max_iters: usize) -> Result<(f64, f64)> {
    let n = op.dim();
    let top = power_iteration(n, |x, out| op.apply(x, out), tol, max_iters, 0x5eed_0001)?;
    let shift = top.value + top.residual;
    let mut tmp = vec![0.0; n];
    let low = power_iteration(
        n,
        |x, out| {
            op.apply(x, &mut tmp);
            for ((o, xi), qi) in out.iter_mut().zip(x).zip(&tmp) {
                *o = shift * xi - qi;
            }
        },
        tol,
        max_iters,
        0x5eed_0002,
    )?;
    let lambda_max = shift;
    let lambda_min = shift - (low.value + low.residual);
    const PAD: f64 = 1e-8;
    Ok((lambda_min * (1.0 - PAD), lambda_max * (1.0 + PAD)))
}
