use std::fmt;

use crate::families::FamilyId;
use crate::models::ModelId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    /// K(m) diverges logarithmically at m = 1; callers switch to hyperbolic forms.
    #[error("quarter period diverges at m = 1")]
    DivergentPeriod,

    #[error("parameters belong to model {found} but {expected} was required")]
    ParamModelMismatch { expected: ModelId, found: ModelId },

    #[error("unknown family `{0}`")]
    UnknownFamily(String),

    #[error("inconsistent solve spec: {0}")]
    InconsistentSpec(String),

    #[error("no convergence after {iterations} iterations (residual norm {norm:e})")]
    NoConvergence {
        iterations: usize,
        norm: f64,
        best: Vec<f64>,
    },

    #[error("crosscheck failed for {family} at {equation}: {detail}")]
    CrosscheckFailure {
        family: FamilyId,
        equation: String,
        detail: String,
        assignment: Vec<(String, f64)>,
    },

    #[error("continuation failed at m = {failed_m} (last good m = {last_good_m:?})")]
    ContinuationFailure {
        failed_m: f64,
        last_good_m: Option<f64>,
    },

    #[error("serialization error: {0}")]
    Serialization(String),

    #[error("record has not converged")]
    NonConvergedRecord,

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    pub(crate) fn domain(msg: impl fmt::Display) -> Self {
        Error::Domain(msg.to_string())
    }

    pub(crate) fn invalid(msg: impl fmt::Display) -> Self {
        Error::InvalidInput(msg.to_string())
    }
}
