use crate::error::EvalError;
use serde::{Deserialize, Serialize};

/// Truncation and tolerance contract for every infinite-series evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesPolicy {
    /// Relative tolerance on the running partial sum.
    pub rel_tol: f64,
    /// Absolute floor below which a term is always considered negligible.
    pub abs_tol: f64,
    /// Hard cap on the number of terms consumed.
    pub max_terms: usize,
}

impl Default for SeriesPolicy {
    fn default() -> Self {
        Self {
            rel_tol: 1e-14,
            abs_tol: 1e-300,
            max_terms: 500,
        }
    }
}

impl SeriesPolicy {
    pub fn validate(&self) -> Result<(), EvalError> {
        if !(self.rel_tol > 0.0) {
            return Err(EvalError::Domain("rel_tol must be > 0"));
        }
        if !(self.abs_tol >= 0.0) {
            return Err(EvalError::Domain("abs_tol must be >= 0"));
        }
        if self.max_terms == 0 {
            return Err(EvalError::Domain("max_terms must be >= 1"));
        }
        Ok(())
    }

    /// Same policy with the absolute floor raised to `abs_tol` (never lowered).
    pub fn with_abs_floor(mut self, abs_tol: f64) -> Self {
        if abs_tol > self.abs_tol {
            self.abs_tol = abs_tol;
        }
        self
    }
}

/// A computed scalar together with its error accounting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalResult {
    /// The computed value.
    pub value: f64,
    /// Magnitude of the last accepted term, or the quadrature error estimate.
    pub err_estimate: f64,
    /// Terms consumed (series) or integrand evaluations (quadrature).
    pub terms_used: usize,
    /// True when the stopping criterion of the policy in force was met.
    pub converged: bool,
    /// max |term| / max(|value|, abs_tol): precision lost to cancellation.
    pub cancellation: f64,
}

impl EvalResult {
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            err_estimate: 0.0,
            terms_used: 0,
            converged: true,
            cancellation: 1.0,
        }
    }
}
