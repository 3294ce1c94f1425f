use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum P1Error {
    #[error("PoleCollision: points {i} and {j} are {separation:e} apart")]
    PoleCollision { i: usize, j: usize, separation: f64 },

    #[error("DegenerateTimes: {0}")]
    DegenerateTimes(String),

    #[error("IllConditioned: condition estimate {cond:e} exceeds {limit:e}")]
    IllConditioned { cond: f64, limit: f64 },

    #[error("NotCanonical: {0}")]
    NotCanonical(String),

    #[error("StepFailure: state norm {norm:e} at step {step} (tau = {tau})")]
    StepFailure { step: usize, tau: num_complex::Complex64, norm: f64 },

    #[error("WrongGenus: expected g = {expected}, got g = {got}")]
    WrongGenus { expected: usize, got: usize },

    #[error("IndexOutOfRange: {what} = {index} not in [{lo}, {hi}]")]
    IndexOutOfRange { what: &'static str, index: i64, lo: i64, hi: i64 },

    #[error("ResidueMismatch: {entry} keeps a pole part of size {residual:e}")]
    ResidueMismatch { entry: String, residual: f64 },

    #[error("InvalidInput: {0}")]
    InvalidInput(String),
}

impl P1Error {
    /// Short variant name, used by the CLI.
    pub fn kind(&self) -> &'static str {
        match self {
            P1Error::PoleCollision { .. } => "PoleCollision",
            P1Error::DegenerateTimes(_) => "DegenerateTimes",
            P1Error::IllConditioned { .. } => "IllConditioned",
            P1Error::NotCanonical(_) => "NotCanonical",
            P1Error::StepFailure { .. } => "StepFailure",
            P1Error::WrongGenus { .. } => "WrongGenus",
            P1Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            P1Error::ResidueMismatch { .. } => "ResidueMismatch",
            P1Error::InvalidInput(_) => "InvalidInput",
        }
    }
}

pub type Result<T> = std::result::Result<T, P1Error>;

pub(crate) fn check_index(what: &'static str, index: i64, lo: i64, hi: i64) -> Result<()> {
    if index < lo || index > hi {
        Err(P1Error::IndexOutOfRange { what, index, lo, hi })
    } else {
        Ok(())
    }
}
