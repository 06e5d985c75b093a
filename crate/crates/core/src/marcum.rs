//! The generalized Marcum Q family Q_M(alpha, beta) via three independent
//! routes (Neumann series, recurrence, defining integral), plus the closed
//! forms reachable through the half-range generating sum: Q_0 on the
//! diagonal, its imaginary-argument continuation, and the limit table.

use crate::error::EvalError;
use crate::kernels::{factorial, upper_gamma_int, CompensatedSum};
use crate::policy::{EvalResult, SeriesPolicy};
use crate::quadrature::{integrate_finite, integrate_semi_infinite, ExpEnvelope, QuadratureSpec};
use crate::special::{
    bessel_i, bessel_i_scaled, bessel_i_scaled_value, s_half_range, scaled_bessel_inner, GenArgs,
};

/// Order and arguments of Q_M(alpha, beta). `new` folds signs, since every
/// Q_M is an even function of both arguments; the fold is bit-exact.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarcumArgs {
    pub m: u32,
    pub alpha: f64,
    pub beta: f64,
}

impl MarcumArgs {
    pub fn new(m: u32, alpha: f64, beta: f64) -> Result<Self, EvalError> {
        if !alpha.is_finite() || !beta.is_finite() {
            return Err(EvalError::Domain("MarcumArgs requires finite alpha, beta"));
        }
        Ok(Self {
            m,
            alpha: alpha.abs(),
            beta: beta.abs(),
        })
    }
}

/// Clamp a raw Q value into the probability range [0, 1].
pub fn clamp_unit(q: f64) -> f64 {
    q.clamp(0.0, 1.0)
}

/// The Neumann-series complement
/// 1 - Q_M = exp(-(alpha^2+beta^2)/2) sum_{n>=M} (beta/alpha)^n I_n(alpha beta),
/// with each summand computed through the regular product form
/// (beta^2/2)^n sum_k (alpha^2 beta^2/4)^k / (k!(n+k)!), so small alpha is
/// safe and no large cancellation ever enters.
pub fn marcum_q_complement_series(
    args: MarcumArgs,
    policy: &SeriesPolicy,
) -> Result<EvalResult, EvalError> {
    policy.validate()?;
    let MarcumArgs { m, alpha, beta } = args;
    if !(alpha > 0.0) {
        return Err(EvalError::Domain(
            "marcum series route requires alpha > 0; use marcum_q_limits at alpha = 0",
        ));
    }
    let t_tilde = beta * beta / 2.0;
    let y = (alpha * beta / 2.0) * (alpha * beta / 2.0);
    let prefactor = (-(alpha * alpha + beta * beta) / 2.0).exp();

    // weight t~^n / n! at n = m
    let mut weight = 1.0f64;
    for i in 1..=m as usize {
        weight *= t_tilde / i as f64;
    }
    let mut acc = CompensatedSum::new();
    let mut max_abs = 0.0f64;
    let mut prev_abs = f64::INFINITY;
    let mut last = 0.0f64;
    let mut used = 0usize;
    let mut converged = false;
    for n in (m as usize)..(m as usize + policy.max_terms) {
        let term = weight * scaled_bessel_inner(n, y, policy.rel_tol);
        if !term.is_finite() {
            return Err(EvalError::NonFiniteTerm { index: n });
        }
        acc.add(term);
        used = n - m as usize + 1;
        let abs = term.abs();
        max_abs = max_abs.max(abs);
        let tol = f64::max(policy.rel_tol * acc.value().abs(), policy.abs_tol);
        last = abs;
        if n > m as usize && abs <= tol && abs <= prev_abs {
            converged = true;
            break;
        }
        prev_abs = abs;
        weight *= t_tilde / (n + 1) as f64;
    }

    let value = prefactor * acc.value();
    Ok(EvalResult {
        value,
        err_estimate: prefactor * last,
        terms_used: used,
        converged,
        cancellation: max_abs / f64::max(acc.value().abs(), policy.abs_tol.max(f64::MIN_POSITIVE)),
    })
}

/// Q_M by the Neumann series (raw, unclamped; see [`clamp_unit`]).
pub fn marcum_q_series(args: MarcumArgs, policy: &SeriesPolicy) -> Result<EvalResult, EvalError> {
    let mut r = marcum_q_complement_series(args, policy)?;
    r.value = 1.0 - r.value;
    Ok(r)
}

fn marcum_integrand(m: u32, alpha: f64) -> impl Fn(f64) -> f64 {
    let p = m as i32 - 1;
    move |u: f64| {
        if u == 0.0 {
            return 0.0;
        }
        let d = u - alpha;
        u * (u / alpha).powi(p) * (-d * d / 2.0).exp() * bessel_i_scaled_value(p as u32, alpha * u)
    }
}

/// Exponential envelope for the defining integrand: pointwise
/// |f(u)| <= u^(2M-1)/(2^(M-1) (M-1)!) exp(-(u-alpha)^2/2) <= coeff exp(-u).
fn marcum_envelope(m: u32, alpha: f64) -> ExpEnvelope {
    let d = 2.0 * m as f64 - 1.0;
    // maximize d ln u + u - (u - alpha)^2 / 2
    let u_star = ((1.0 + alpha) + ((1.0 + alpha) * (1.0 + alpha) + 4.0 * d).sqrt()) / 2.0;
    let h = d * u_star.ln() + u_star - (u_star - alpha) * (u_star - alpha) / 2.0;
    let coeff = h.exp() / (2f64.powi(m as i32 - 1) * factorial(m as usize - 1));
    ExpEnvelope { coeff, rate: 1.0 }
}

/// Q_M by the defining integral
/// int_beta^inf x (x/alpha)^(M-1) exp(-(x^2+alpha^2)/2) I_{M-1}(alpha x) dx,
/// with Gaussian-envelope truncation. M >= 1 only: the M = 0 weight changes
/// the head behaviour, and Q_0 already has two routes (use q0_via_genfunc).
pub fn marcum_q_integral(args: MarcumArgs, spec: &QuadratureSpec) -> Result<EvalResult, EvalError> {
    let MarcumArgs { m, alpha, beta } = args;
    if m == 0 {
        return Err(EvalError::Domain(
            "marcum_q_integral requires M >= 1; route M = 0 through q0_via_genfunc",
        ));
    }
    if !(alpha > 0.0) {
        return Err(EvalError::Domain(
            "marcum_q_integral requires alpha > 0; use marcum_q_limits at alpha = 0",
        ));
    }
    integrate_semi_infinite(marcum_integrand(m, alpha), beta, marcum_envelope(m, alpha), spec)
}

/// The complement 1 - Q_M as the finite integral int_0^beta of the same
/// integrand. Keeps full relative accuracy when Q_M is close to 1.
pub fn marcum_q_integral_complement(
    args: MarcumArgs,
    spec: &QuadratureSpec,
) -> Result<EvalResult, EvalError> {
    let MarcumArgs { m, alpha, beta } = args;
    if m == 0 {
        return Err(EvalError::Domain(
            "marcum_q_integral_complement requires M >= 1",
        ));
    }
    if !(alpha > 0.0) {
        return Err(EvalError::Domain(
            "marcum_q_integral_complement requires alpha > 0",
        ));
    }
    integrate_finite(marcum_integrand(m, alpha), 0.0, beta, spec)
}

/// One step of the recurrence
/// Q_M = Q_{M-1} + (beta/alpha)^(M-1) exp(-(beta^2+alpha^2)/2) I_{M-1}(alpha beta).
/// The added term is nonnegative, so the output never drops below the input.
pub fn marcum_q_recurrence(q_prev: f64, args: MarcumArgs) -> Result<f64, EvalError> {
    let MarcumArgs { m, alpha, beta } = args;
    if m == 0 {
        return Err(EvalError::Domain("marcum_q_recurrence requires M >= 1"));
    }
    if !(alpha > 0.0) {
        return Err(EvalError::Domain("marcum_q_recurrence requires alpha > 0"));
    }
    let t_tilde = beta * beta / 2.0;
    let y = (alpha * beta / 2.0) * (alpha * beta / 2.0);
    let mut weight = 1.0f64;
    for i in 1..m as usize {
        weight *= t_tilde / i as f64;
    }
    let term = (-(alpha * alpha + beta * beta) / 2.0).exp()
        * weight
        * scaled_bessel_inner(m as usize - 1, y, 1e-15);
    Ok(q_prev + term)
}

/// Q_0 through the main generating function:
/// Q_0(sqrt(x/t), sqrt(x t)) = 1 - exp(-x(t+1/t)/2) S(x, t), 0 < t <= 1.
pub fn q0_via_genfunc(args: GenArgs, policy: &SeriesPolicy) -> Result<EvalResult, EvalError> {
    if !(args.t > 0.0) {
        return Err(EvalError::Domain("q0_via_genfunc requires 0 < t <= 1"));
    }
    let theta = (args.t + 1.0 / args.t) / 2.0;
    let mut s = s_half_range(args, policy)?;
    s.value = 1.0 - (-args.x * theta).exp() * s.value;
    Ok(s)
}

/// Diagonal closed form Q_0(sqrt(x), sqrt(x)) = (1 - exp(-x) I_0(x)) / 2.
pub fn q0_diag(x: f64) -> Result<EvalResult, EvalError> {
    if !(x >= 0.0) {
        return Err(EvalError::Domain("q0_diag requires x >= 0"));
    }
    let mut r = bessel_i_scaled(0, x, &SeriesPolicy::default())?;
    r.value = (1.0 - r.value) / 2.0;
    Ok(r)
}

/// Largest x for which exp(x) I_0(x) ~ exp(2x)/sqrt(2 pi x) stays finite.
pub const Q0_IMAG_OVERFLOW_THRESHOLD: f64 = 350.0;

/// Imaginary-argument diagonal continuation
/// Q_0(i sqrt(x), i sqrt(x)) = (1 - exp(x) I_0(x)) / 2, real-valued and
/// outside [0, 1] for x > 0.
pub fn q0_imag_diag(x: f64) -> Result<EvalResult, EvalError> {
    if !(x >= 0.0) {
        return Err(EvalError::Domain("q0_imag_diag requires x >= 0"));
    }
    if x > Q0_IMAG_OVERFLOW_THRESHOLD {
        return Err(EvalError::Range("q0_imag_diag overflows for x > 350"));
    }
    let mut r = bessel_i(0, x, &SeriesPolicy::default())?;
    r.value = (1.0 - x.exp() * r.value) / 2.0;
    Ok(r)
}

/// Which coordinate of (alpha, beta) is taken to its boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitCoordinate {
    AlphaZero,
    AlphaInf,
    BetaZero,
    BetaInf,
}

/// Limit values of Q_M at the coordinate boundaries.
///
/// One row deviates from the customary printed table: as beta -> inf the
/// defining integral is the tail of a unit-mass density, so the limit is 0
/// for every M (the table sometimes shows 1 there, which contradicts
/// Q_M(alpha, 0) = 1 plus monotone decrease in beta).
pub fn marcum_q_limits(args: MarcumArgs, which: LimitCoordinate) -> Result<f64, EvalError> {
    let MarcumArgs { m, alpha, beta } = args;
    match which {
        LimitCoordinate::AlphaZero => {
            if m == 0 {
                Ok(0.0)
            } else {
                let g = upper_gamma_int(m, beta * beta / 2.0)?;
                Ok(g.value / factorial(m as usize - 1))
            }
        }
        LimitCoordinate::AlphaInf => Ok(1.0),
        LimitCoordinate::BetaZero => {
            if m == 0 {
                Ok(1.0 - (-alpha * alpha / 2.0).exp())
            } else {
                Ok(1.0)
            }
        }
        LimitCoordinate::BetaInf => Ok(0.0),
    }
}
