use thiserror::Error;

/// Errors raised by the estimators, bound calculators and design machinery.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degree {degree} outside the supported range {min}..={max}")]
    DegreeOutOfRange { degree: usize, min: usize, max: usize },

    #[error("argument {value} outside the domain {domain}")]
    DomainError { value: f64, domain: &'static str },

    #[error("invalid probability distribution: {0}")]
    InvalidDistribution(String),

    #[error("power sum {value} infeasible for {outcomes} outcomes at order {order}")]
    InfeasibleIndex { value: f64, outcomes: usize, order: usize },

    #[error("no convergence: {0}")]
    ConvergenceFailure(String),

    #[error("unknown tag `{0}`")]
    InvalidTag(String),

    #[error("unknown design `{0}`")]
    UnknownDesign(String),

    #[error("dimension mismatch: {0}")]
    DimensionError(String),

    #[error("moment vector holds orders up to {available}, order {requested} requested")]
    InsufficientMoments { requested: usize, available: usize },

    #[error("invalid quantum state: {0}")]
    InvalidState(String),

    #[error("invalid design: {0}")]
    InvalidDesign(String),

    #[error("sandwich violated at {at}: {detail}")]
    SandwichViolation { at: f64, detail: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_degree(degree: usize, min: usize, max: usize) -> Result<()> {
    if degree < min || degree > max {
        Err(Error::DegreeOutOfRange { degree, min, max })
    } else {
        Ok(())
    }
}

pub(crate) fn check_unit_interval(x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::DomainError {
            value: x,
            domain: "[0, 1]",
        })
    }
}
