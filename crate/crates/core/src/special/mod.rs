//! Bessel I_n and J_m, Laguerre L_n, the half-range generating sum S(x, t)
//! and the weighted Laguerre/Bessel sums — each available through at least
//! two independent representations so identities can be cross-certified.

mod bessel;
mod genfun;
mod laguerre;

pub use bessel::{
    bessel_i, bessel_i_integral, bessel_i_scaled, bessel_j, bessel_j_ratio,
};
pub use genfun::{
    bessel_tail_weighted, gen_full_range, laguerre_weighted_sum, s_half_range, GenArgs,
};
pub use laguerre::{laguerre, laguerre_generating_sum, laguerre_integral, laguerre_recurrence};

pub(crate) use bessel::{bessel_i_scaled_value, bessel_j_ratio_value, integrand_policy};
pub(crate) use genfun::scaled_bessel_inner;
