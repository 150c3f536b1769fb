use apdpro::linalg::norm;
use apdpro::solvers::{MetricIterate, StepView};
use apdpro::{BlockNormObjective, ConstrainedProblem};

use crate::reference::Reference;

pub const CSV_HEADER: [&str; 10] =
    ["iter", "epoch", "objective", "rel_gap", "feas_violation", "rho", "tau", "sigma", "active_set_acc", "elapsed_s"];

/// One CSV row. Metrics that need a reference are `None` without one.
#[derive(Debug, Clone, PartialEq)]
pub struct IterateRecord {
    pub iter: usize,
    pub epoch: usize,
    pub objective: f64,
    pub rel_gap: Option<f64>,
    pub feas_violation: f64,
    pub rho: f64,
    pub tau: f64,
    pub sigma: f64,
    pub active_set_acc: Option<f64>,
    pub elapsed_s: f64,
}

impl IterateRecord {
    pub fn csv_fields(&self) -> [String; 10] {
        let f = |v: f64| format!("{v:.16e}");
        let opt = |v: Option<f64>| v.map(f).unwrap_or_default();
        [
            self.iter.to_string(),
            self.epoch.to_string(),
            f(self.objective),
            opt(self.rel_gap),
            f(self.feas_violation),
            f(self.rho),
            f(self.tau),
            f(self.sigma),
            opt(self.active_set_acc),
            f(self.elapsed_s),
        ]
    }
}

/// Zero pattern agreement over blocks after truncating blocks with norm below
/// `threshold`: `(|A ∩ A*| + |Aᶜ ∩ A*ᶜ|) / B`, where `A` is the set of zero
/// blocks.
pub fn active_set_accuracy(objective: &BlockNormObjective, x: &[f64], x_ref: &[f64], threshold: f64) -> f64 {
    let mut agree = 0usize;
    for (range, _) in objective.blocks() {
        let zero = norm(&x[range.clone()]) < threshold;
        let zero_ref = norm(&x_ref[range]) < threshold;
        if zero == zero_ref {
            agree += 1;
        }
    }
    agree as f64 / objective.num_blocks() as f64
}

/// `|f − f*| / |f*|`
pub fn relative_gap(f: f64, f_star: f64) -> f64 {
    (f - f_star).abs() / f_star.abs()
}

/// Fills a record from the solver's step at the chosen iterate.
pub fn compute_metrics(
    problem: &ConstrainedProblem,
    step: &StepView<'_>,
    which: MetricIterate,
    reference: Option<&Reference>,
    truncation: f64,
    elapsed_s: f64,
) -> IterateRecord {
    let x = match which {
        MetricIterate::Last => step.x,
        MetricIterate::Ergodic => step.x_bar,
    };
    let objective = problem.objective.eval(x);
    IterateRecord {
        iter: step.record.iter,
        epoch: step.record.epoch,
        objective,
        rel_gap: reference.map(|r| relative_gap(objective, r.f_star)),
        feas_violation: problem.feasibility_violation(x),
        rho: step.record.rho,
        tau: step.record.tau,
        sigma: step.record.sigma,
        active_set_acc: reference.map(|r| active_set_accuracy(&problem.objective, x, &r.x, truncation)),
        elapsed_s,
    }
}
