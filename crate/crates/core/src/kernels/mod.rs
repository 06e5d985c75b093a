//! Foundational scalar kernels: a compensated series-summation engine,
//! the error function and its imaginary companion, and the integer-order
//! upper incomplete gamma. Everything else in the crate is built on these.
//!
//! All operations are pure and stateless.

mod erf;
mod gamma;
mod series;

pub use erf::{erf, erfi, ERFI_OVERFLOW_THRESHOLD};
pub use gamma::upper_gamma_int;
pub use series::{factorial, sum_series, CompensatedSum};
