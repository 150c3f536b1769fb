//! Quick property and oracle checks runnable from the command line.

use std::sync::Arc;

use apdpro::linalg::SymmetricOperator;
use apdpro::pagerank::{canonical_instance, parse_edge_list, spectral_bounds, PprOperator};
use apdpro::prox::{project_dual_set, prox_f_over_ball, DualSlab};
use apdpro::solvers::{default_start, solve, NoMonitor, SolverConfig, Variant};
use apdpro::{Ball, BlockNormObjective};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::oracles::{project_slab_enumerate, prox_l1_ball_admm};

pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

pub fn run_selftest() -> Vec<Check> {
    vec![prox_check(), projection_check(), canonical_check(), ppr_check()]
}

fn prox_check() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let n = rng.gen_range(1..=5);
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..2.0)).collect();
        let c: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let (eta, radius) = (rng.gen_range(0.05..2.0), rng.gen_range(0.2..3.0));
        let obj = BlockNormObjective::weighted_l1(w.clone()).expect("positive weights");
        let ball = Ball { center: c.clone(), radius };
        let got = prox_f_over_ball(&v, eta, &obj, &ball).expect("valid prox");
        let want = prox_l1_ball_admm(&v, &w, eta, &c, radius);
        worst = worst.max(apdpro::linalg::dist(&got, &want));
    }
    Check { name: "prox over ball vs ADMM", passed: worst <= 1e-5, detail: format!("max error {worst:.2e}") }
}

fn projection_check() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let m = rng.gen_range(1..=3);
        let u: Vec<f64> = (0..m).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let upper = rng.gen_range(0.0..4.0);
        let lower = rng.gen_range(0.0..=upper);
        let got = project_dual_set(&u, DualSlab::new(lower, upper).expect("valid slab")).expect("projection");
        let want = project_slab_enumerate(&u, lower, upper);
        worst = worst.max(apdpro::linalg::dist(&got, &want));
    }
    Check { name: "dual projection vs enumeration", passed: worst <= 1e-8, detail: format!("max error {worst:.2e}") }
}

fn canonical_check() -> Check {
    let inst = canonical_instance();
    let (x0, y0) = default_start(&inst.problem, &inst.constants);
    let cfg = SolverConfig::new(Variant::Apdpro).with_max_iters(2000);
    match solve(&inst.problem, &inst.constants, &cfg, &x0, &y0, &mut NoMonitor) {
        Ok(run) => {
            let err = (run.x[0] - inst.x_star[0]).abs();
            Check {
                name: "APDPro on the canonical instance",
                passed: err <= 1e-4,
                detail: format!("|x - x*| = {err:.2e}"),
            }
        }
        Err(e) => Check { name: "APDPro on the canonical instance", passed: false, detail: e.to_string() },
    }
}

fn ppr_check() -> Check {
    let name = "PPR operator on the 2-node path";
    let graph = match parse_edge_list("0 1") {
        Ok(g) => Arc::new(g),
        Err(e) => return Check { name, passed: false, detail: e.to_string() },
    };
    let op = PprOperator::new(graph, 0.5).expect("alpha in range");
    let mut q = [0.0; 2];
    op.apply(&[1.0, 0.0], &mut q);
    let (lo, hi) = spectral_bounds(&op).unwrap_or((f64::NAN, f64::NAN));
    let passed = q == [0.75, -0.25] && (lo - 0.5).abs() <= 1e-8 && (hi - 1.0).abs() <= 1e-8;
    Check { name, passed, detail: format!("Q e1 = {q:?}, spectrum in [{lo}, {hi}]") }
}
