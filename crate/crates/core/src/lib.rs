//! Numerics for modified Bessel, Laguerre and generalized Marcum Q
//! functions, built around multiple independent representations of each
//! quantity, together with a harness that numerically certifies the
//! identities connecting them over parameter grids.
//!
//! Layout:
//! - [`kernels`]: compensated series summation, erf/erfi, integer-order
//!   incomplete gamma;
//! - [`quadrature`]: deterministic finite and semi-infinite integration;
//! - [`special`]: Bessel I/J, Laguerre, the half-range generating sum and
//!   the weighted sums, each with at least two routes;
//! - [`marcum`]: the Q_M family (series, recurrence, integral) and its
//!   closed forms;
//! - [`harness`]: the identity catalogue, grid runner and report model.

// `!(x >= 0.0)` guards reject NaN along with the out-of-domain sign;
// the positive form would wave NaN through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod harness;
pub mod kernels;
pub mod marcum;
pub mod policy;
pub mod quadrature;
pub mod special;

pub use error::EvalError;
pub use policy::{EvalResult, SeriesPolicy};
pub use quadrature::QuadratureSpec;
