use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("strict point is not strictly feasible: g_{index}(x~) = {value}")]
    NotStrictlyFeasible { index: usize, value: f64 },

    #[error("constraint {index} cannot be satisfied strictly: min g = {value}")]
    InfeasibleConstraint { index: usize, value: f64 },

    #[error("dual cut is empty: lower bound {lower} exceeds upper bound {upper}")]
    InfeasibleCut { lower: f64, upper: f64 },

    #[error("step sizes violate tau0^-1 >= L_XY + L_G^2 sigma0 ({lhs} < {rhs})")]
    StepSizeInfeasible { lhs: f64, rhs: f64 },

    #[error("minimizer of the objective is feasible (g(0) = {0}); the constraint is inactive")]
    InactiveConstraint(f64),

    #[error("target level unattainable: g at the unconstrained minimizer is {0}")]
    TargetUnattainable(f64),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("rejected input: {0}")]
    RejectedInput(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),
}

pub(crate) fn check_len(what: &str, got: usize, expected: usize) -> Result<()> {
    if got != expected {
        return Err(Error::InvalidArgument(format!("{what} has length {got}, expected {expected}")));
    }
    Ok(())
}
