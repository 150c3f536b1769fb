//! Brute-force reference implementations used to validate the solver
//! building blocks. They share no code with the library routines they check.

/// `argmin_x η Σ p_j |x_j| + ½‖x − v‖²` over `‖x − c‖ ≤ R`, by ADMM on the
/// split `x = z`, `z ∈ B(c, R)`. Returns the feasible iterate `z`.
pub fn prox_l1_ball_admm(v: &[f64], weights: &[f64], eta: f64, center: &[f64], radius: f64) -> Vec<f64> {
    let n = v.len();
    let penalty = 1.0;
    let mut z = project_ball(v, center, radius);
    let mut u = vec![0.0; n];
    let mut x = vec![0.0; n];
    for _ in 0..200_000 {
        // x-step: shrink the combined quadratic's center
        for j in 0..n {
            let w = (v[j] + penalty * (z[j] - u[j])) / (1.0 + penalty);
            let t = eta * weights[j] / (1.0 + penalty);
            x[j] = w.signum() * (w.abs() - t).max(0.0);
        }
        let xu: Vec<f64> = x.iter().zip(&u).map(|(a, b)| a + b).collect();
        let z_next = project_ball(&xu, center, radius);
        let mut primal = 0.0;
        let mut dual = 0.0;
        for j in 0..n {
            u[j] += x[j] - z_next[j];
            primal += (x[j] - z_next[j]).powi(2);
            dual += (z_next[j] - z[j]).powi(2);
        }
        z = z_next;
        if primal.sqrt() < 1e-15 && dual.sqrt() < 1e-15 {
            break;
        }
    }
    z
}

fn project_ball(x: &[f64], center: &[f64], radius: f64) -> Vec<f64> {
    let d = x.iter().zip(center).map(|(a, c)| (a - c).powi(2)).sum::<f64>().sqrt();
    if d <= radius {
        return x.to_vec();
    }
    x.iter().zip(center).map(|(a, c)| c + radius / d * (a - c)).collect()
}

/// One-dimensional version by scanning: a grid of step `1e−3` over the
/// interval, a grid of step `1e−6` around the best point, then a
/// golden-section refinement.
pub fn prox_l1_interval_scan(v: f64, weight: f64, eta: f64, center: f64, radius: f64) -> f64 {
    let phi = |x: f64| eta * weight * x.abs() + 0.5 * (x - v).powi(2);
    let (lo, hi) = (center - radius, center + radius);
    let scan = |a: f64, b: f64, step: f64| {
        let steps = ((b - a) / step).ceil() as usize;
        let mut best = a;
        for i in 0..=steps {
            let x = (a + i as f64 * step).min(b);
            if phi(x) < phi(best) {
                best = x;
            }
        }
        best
    };
    let coarse = scan(lo, hi, 1e-3);
    let fine = scan((coarse - 1e-3).max(lo), (coarse + 1e-3).min(hi), 1e-6);
    let (mut a, mut b) = ((fine - 1e-6).max(lo), (fine + 1e-6).min(hi));
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..100 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if phi(c) < phi(d) {
            b = d;
        } else {
            a = c;
        }
    }
    0.5 * (a + b)
}

/// Projection of `u` onto `{y ≥ 0 : lower ≤ Σy ≤ upper}` by enumerating
/// which coordinates sit at zero and which side of the slab (if any) binds.
pub fn project_slab_enumerate(u: &[f64], lower: f64, upper: f64) -> Vec<f64> {
    let m = u.len();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for zeros in 0u32..(1 << m) {
        let free: Vec<usize> = (0..m).filter(|i| zeros & (1 << i) == 0).collect();
        let free_sum: f64 = free.iter().map(|&i| u[i]).sum();
        let mut shifts = vec![0.0];
        if !free.is_empty() {
            for level in [lower, upper] {
                shifts.push((free_sum - level) / free.len() as f64);
            }
        }
        for nu in shifts {
            let mut y = vec![0.0; m];
            for &i in &free {
                y[i] = u[i] - nu;
            }
            let s: f64 = y.iter().sum();
            let feasible = y.iter().all(|v| *v >= -1e-12) && s >= lower - 1e-12 && s <= upper + 1e-12;
            if !feasible {
                continue;
            }
            let d: f64 = y.iter().zip(u).map(|(a, b)| (a - b).powi(2)).sum();
            if best.as_ref().is_none_or(|(bd, _)| d < *bd) {
                best = Some((d, y));
            }
        }
    }
    best.expect("the slab is nonempty").1
}
