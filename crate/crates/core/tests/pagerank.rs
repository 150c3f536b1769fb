use std::sync::Arc;

use apdpro::linalg::{dot, norm, SymmetricOperator};
use apdpro::pagerank::{build_ppr_problem, Graph, PprOperator, RadiusRule, Teleport};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Connected graph: a random spanning tree plus extra edges.
fn random_graph(n: usize, extra: usize, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    let mut edges: Vec<(usize, usize)> = (1..n).map(|i| (rng.gen_range(0..i), i)).collect();
    for _ in 0..extra {
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if a != b {
            edges.push((a, b));
        }
    }
    edges
}

/// `Q` built entry by entry from the edge list.
fn dense_q(n: usize, edges: &[(usize, usize)], alpha: f64) -> Vec<f64> {
    let mut adj = vec![0.0; n * n];
    for &(a, b) in edges {
        adj[a * n + b] = 1.0;
        adj[b * n + a] = 1.0;
    }
    let deg: Vec<f64> = (0..n).map(|i| adj[i * n..(i + 1) * n].iter().sum()).collect();
    let h = (1.0 - alpha) / 2.0;
    let mut q = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let id = if i == j { 1.0 } else { 0.0 };
            q[i * n + j] = id - h * (id + adj[i * n + j] / (deg[i] * deg[j]).sqrt());
        }
    }
    q
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn sparse_operator_matches_dense(seed in any::<u64>(), n in 2usize..=50, alpha in 0.05..0.95f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let edges = random_graph(n, n, &mut rng);
        let graph = Arc::new(Graph::from_edges(n, &edges).unwrap());
        let op = PprOperator::new(graph, alpha).unwrap();
        let q = dense_q(n, &edges, alpha);
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut out = vec![0.0; n];
        op.apply(&x, &mut out);
        for i in 0..n {
            prop_assert!((out[i] - dot(&q[i * n..(i + 1) * n], &x)).abs() <= 1e-12);
        }
    }
}

fn instance(seed: u64) -> apdpro::pagerank::PprInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = 30;
    let edges = random_graph(n, 40, &mut rng);
    let graph = Arc::new(Graph::from_edges(n, &edges).unwrap());
    build_ppr_problem(graph, 0.25, 1e-4, &Teleport::Seeds(vec![0, 7]), RadiusRule::MinDegree).unwrap()
}

#[test]
fn constraint_gradient_matches_central_differences() {
    let inst = instance(3);
    let g = &inst.problem.constraints;
    let n = inst.problem.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut grad, mut gp, mut gm) = (vec![0.0; n], [0.0], [0.0]);
    for _ in 0..20 {
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        g.gradient(0, &x, &mut grad);
        let h = 1e-5;
        let mut diff = vec![0.0; n];
        for i in 0..n {
            let (mut xp, mut xm) = (x.clone(), x.clone());
            xp[i] += h;
            xm[i] -= h;
            g.eval(&xp, &mut gp);
            g.eval(&xm, &mut gm);
            diff[i] = (gp[0] - gm[0]) / (2.0 * h) - grad[i];
        }
        assert!(norm(&diff) <= 1e-6 * norm(&grad), "relative error {}", norm(&diff) / norm(&grad));
    }
}

#[test]
fn rayleigh_quotients_stay_within_spectral_bounds() {
    let inst = instance(5);
    let n = inst.problem.dim();
    assert!(inst.alpha <= inst.lambda_min && inst.lambda_max <= 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut qx = vec![0.0; n];
    for _ in 0..100 {
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        inst.operator.apply(&x, &mut qx);
        let rq = dot(&x, &qx) / dot(&x, &x);
        assert!(rq >= inst.lambda_min - 1e-12 && rq <= inst.lambda_max + 1e-12, "{rq}");
    }
}
