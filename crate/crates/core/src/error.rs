use std::fmt;

/// Errors produced by series evaluation, quadrature and the special-function
/// routines built on top of them.
#[derive(Debug, Clone, PartialEq)]
pub enum EvalError {
    /// A series produced a non-finite term; `index` is the offending term.
    NonFiniteTerm { index: usize },
    /// An integrand returned NaN at abscissa `at`.
    NonFiniteSample { at: f64 },
    /// Input outside the documented domain; the message names the violated
    /// constraint.
    Domain(&'static str),
    /// The result magnitude would leave the floating-point range.
    Range(&'static str),
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NonFiniteTerm { index } => {
                write!(f, "series produced a non-finite term at index {index}")
            }
            Self::NonFiniteSample { at } => {
                write!(f, "integrand returned NaN at x = {at}")
            }
            Self::Domain(constraint) => write!(f, "domain error: {constraint}"),
            Self::Range(what) => write!(f, "range error: {what}"),
        }
    }
}

impl std::error::Error for EvalError {}
