use crate::error::EvalError;
use crate::kernels::{sum_series, CompensatedSum};
use crate::policy::{EvalResult, SeriesPolicy};
use crate::quadrature::{integrate_semi_infinite, ExpEnvelope, QuadratureSpec};
use crate::special::bessel::bessel_j_ratio_value;

/// Laguerre polynomial L_n(x) by its exact finite sum
/// sum_{k=0}^{n} (-1)^k n! x^k / ((k!)^2 (n-k)!), compensated.
pub fn laguerre(n: u32, x: f64, policy: &SeriesPolicy) -> Result<EvalResult, EvalError> {
    if !x.is_finite() {
        return Err(EvalError::Domain("laguerre requires finite x"));
    }
    let mut term = 1.0f64;
    let mut k = 0u32;
    let terms = std::iter::from_fn(move || {
        if k > n {
            return None;
        }
        let t = term;
        term *= -x * (n - k) as f64 / ((k + 1) as f64 * (k + 1) as f64);
        k += 1;
        Some(t)
    });
    let mut r = sum_series(terms, policy)?;
    // the sum is exact in exact arithmetic; report the rounding floor instead
    r.err_estimate = 4.0 * f64::EPSILON * r.cancellation * r.value.abs().max(policy.abs_tol);
    Ok(r)
}

/// L_0..L_n by the three-term recurrence
/// (n+1) L_{n+1} = (2n+1-x) L_n - n L_{n-1}.
///
/// Stable for the large degrees the generating-function sums reach, where the
/// factorial form loses all precision to cancellation.
pub fn laguerre_recurrence(n_max: usize, x: f64) -> Vec<f64> {
    let mut values = Vec::with_capacity(n_max + 1);
    values.push(1.0);
    if n_max == 0 {
        return values;
    }
    values.push(1.0 - x);
    for n in 1..n_max {
        let nf = n as f64;
        let next = ((2.0 * nf + 1.0 - x) * values[n] - nf * values[n - 1]) / (nf + 1.0);
        values.push(next);
    }
    values
}

/// L_n(x) through the damped integral representation
/// (exp(x)/n!) int_0^inf u^n exp(-u) J_0(2 sqrt(x u)) du.
pub fn laguerre_integral(n: u32, x: f64, spec: &QuadratureSpec) -> Result<EvalResult, EvalError> {
    if !(x >= 0.0) {
        return Err(EvalError::Domain("laguerre_integral requires x >= 0"));
    }
    if n > 30 {
        return Err(EvalError::Domain(
            "laguerre_integral is supported for n <= 30",
        ));
    }
    let n_i32 = n as i32;
    let envelope = ExpEnvelope::poly_exp(n, 1.0);
    let mut r = integrate_semi_infinite(
        |u: f64| u.powi(n_i32) * (-u).exp() * bessel_j_ratio_value(0, x * u),
        0.0,
        envelope,
        spec,
    )?;
    let prefactor = x.exp() / crate::kernels::factorial(n as usize);
    r.value *= prefactor;
    r.err_estimate *= prefactor;
    Ok(r)
}

/// Partial sums of the Laguerre generating function sum_n t^n L_n(x),
/// closed form (1-t)^(-1) exp(-x t/(1-t)) for |t| < 1.
///
/// L_n comes from the recurrence: the sum routinely needs degrees in the
/// hundreds, far beyond where the factorial form is usable.
pub fn laguerre_generating_sum(
    x: f64,
    t: f64,
    policy: &SeriesPolicy,
) -> Result<EvalResult, EvalError> {
    policy.validate()?;
    if !(t.abs() < 1.0) {
        return Err(EvalError::Domain("laguerre_generating_sum requires |t| < 1"));
    }
    let values = laguerre_recurrence(policy.max_terms, x);
    let mut acc = CompensatedSum::new();
    let mut tn = 1.0f64;
    let mut max_abs = 0.0f64;
    let mut last_abs = 0.0f64;
    let mut prev_abs = f64::INFINITY;
    let mut used = 0usize;
    let mut converged = false;
    for (n, l) in values.iter().enumerate() {
        if n >= policy.max_terms {
            break;
        }
        let term = tn * l;
        acc.add(term);
        used = n + 1;
        let abs = term.abs();
        max_abs = max_abs.max(abs);
        // the recurrence bound |L_n| <= e^{x/2} certifies the geometric tail
        let tail_bound = tn.abs() * t.abs() * (x / 2.0).exp() / (1.0 - t.abs());
        let tol = f64::max(policy.rel_tol * acc.value().abs(), policy.abs_tol);
        if n >= 1 && abs <= tol && abs <= prev_abs && tail_bound <= tol {
            last_abs = abs.max(tail_bound);
            converged = true;
            break;
        }
        prev_abs = abs;
        last_abs = abs;
        tn *= t;
    }
    let value = acc.value();
    Ok(EvalResult {
        value,
        err_estimate: last_abs,
        terms_used: used,
        converged,
        cancellation: max_abs / f64::max(value.abs(), policy.abs_tol.max(f64::MIN_POSITIVE)),
    })
}
