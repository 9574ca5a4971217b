//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid problem: {0}")]
    InvalidSpec(String),

    #[error("t = {t} lies outside the problem interval [{a}, {b}]")]
    OutOfInterval { t: f64, a: f64, b: f64 },

    #[error("integrator stalled near t = {t}: step size underflow")]
    IntegratorStall { t: f64 },

    #[error("integrator exceeded the step budget near t = {t}")]
    StepBudget { t: f64 },

    #[error(
        "problem is not uniquely solvable: characteristic determinant {det:.6e} \
         below threshold {threshold:.3e}"
    )]
    NotSolvable { det: f64, threshold: f64 },

    #[error(
        "evaluation at the diagonal t = s = {t} requires an explicit side \
         for derivative order {order}"
    )]
    DiagonalSide { t: f64, order: usize },

    #[error("derivative order {order} not supported here (maximum {max})")]
    UnsupportedOrder { order: usize, max: usize },

    #[error("kernels come from incompatible problems: {0}")]
    SpecMismatch(String),

    #[error("recurrence hypothesis fails at level {level}: {reason}")]
    RecurrenceHypothesis { level: usize, reason: String },

    #[error("closed-form kernel undefined: {0}")]
    OracleUndefined(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
