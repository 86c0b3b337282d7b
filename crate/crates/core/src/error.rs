//! Crate-wide error type.

use alloc::vec::Vec;

use crate::qstate::UnitTag;

/// Everything that can go wrong across the crate.
///
/// Most variants reject invalid inputs; [`Error::StepInstability`] and
/// [`Error::NonConvergence`] report numerical failures of otherwise valid
/// problems (see [`Error::is_numerical`]).
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("{name} must be {requirement}, got {value}")]
    Domain {
        name: &'static str,
        requirement: &'static str,
        value: f64,
    },
    #[error("{0}")]
    Invalid(&'static str),
    #[error("state norm² is {norm_sq}, expected 1 within {tol}")]
    NotNormalized { norm_sq: f64, tol: f64 },
    #[error("matrix is not Hermitian: max |A - A†| entry is {max_asymmetry}, tolerance {tol}")]
    NotHermitian { max_asymmetry: f64, tol: f64 },
    #[error("density matrix trace is {trace}, expected 1 within {tol}")]
    TraceNotOne { trace: f64, tol: f64 },
    #[error("matrix is not positive semidefinite: eigenvalue {min_eigenvalue} is below the floor {floor}")]
    NotPositiveSemidefinite { min_eigenvalue: f64, floor: f64 },
    #[error("cells {i} and {j} share a position; kernel construction needs pairwise distinct cells")]
    DegenerateConfiguration { i: usize, j: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("unit tag mismatch: expected {expected}, got {got}")]
    UnitMismatch { expected: UnitTag, got: UnitTag },
    #[error("map extraction needs N² ≤ {cap}, got N² = {dim}")]
    DimensionCap { dim: usize, cap: usize },
    #[error("trace drift {trace_drift} exceeded the budget {budget} at step {step}; reduce dt")]
    StepInstability {
        trace_drift: f64,
        budget: f64,
        step: usize,
    },
    #[error("no convergence after {iterations} iterations; last relative change {last_change}")]
    NonConvergence {
        iterations: usize,
        last_change: f64,
        residual_history: Vec<f64>,
    },
    #[error("need at least {need} samples, got {got}")]
    TooFewSamples { got: usize, need: usize },
}

impl Error {
    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::StepInstability { .. } | Error::NonConvergence { .. }
        )
    }
}

pub type Result<T> = core::result::Result<T, Error>;

/// Rejects non-finite or out-of-range scalars with a uniform message.
pub(crate) fn require_positive(name: &'static str, value: f64) -> Result<f64> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Domain {
            name,
            requirement: "finite and > 0",
            value,
        })
    }
}

pub(crate) fn require_non_negative(name: &'static str, value: f64) -> Result<f64> {
    if value >= 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Domain {
            name,
            requirement: "finite and ≥ 0",
            value,
        })
    }
}
