//! Identity catalogue, grid runner and report model.
//!
//! Every identity pairs two computations whose code paths share nothing
//! above the scalar kernels; agreement over a grid certifies the identity
//! rather than the implementation. Per-case failures are data, not errors:
//! an unconverged sub-evaluation yields a failing case with diagnostics.

mod catalogue;
mod evaluate;
mod report;

pub use catalogue::{IdentityId, IdentityInfo, ALL_IDENTITIES, CATALOGUE};
pub use evaluate::{run_grid, verify_point, GridSpec, Policies};
pub use report::{
    format_point, render_report, ExcludedPoint, IdentityCase, IdentitySummary, Point,
    ReportFormat, VerificationReport,
};
