use crate::error::EvalError;
use crate::kernels::{factorial, CompensatedSum};
use crate::policy::{EvalResult, SeriesPolicy};
use crate::special::bessel::bessel_i;
use crate::special::laguerre::laguerre;

/// The (x, t) pair of the generating-function family: x is the common Bessel
/// argument, t the generating parameter. The Marcum chart is beta/alpha = t,
/// alpha*beta = x.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenArgs {
    pub x: f64,
    pub t: f64,
}

impl GenArgs {
    pub fn new(x: f64, t: f64) -> Result<Self, EvalError> {
        if !(x >= 0.0) {
            return Err(EvalError::Domain("GenArgs requires x >= 0"));
        }
        if t == 0.0 || !t.is_finite() {
            return Err(EvalError::Domain("GenArgs requires finite t != 0"));
        }
        if t.abs() > 1.0 {
            return Err(EvalError::Domain("GenArgs requires |t| <= 1"));
        }
        Ok(Self { x, t })
    }
}

/// Half-range generating sum S(x, t) = sum_{n>=0} t^n I_n(x) by direct
/// compensated summation; this is the oracle for every S identity.
///
/// The tail certificate I_n(x) <= (x/2)^n cosh(x)/n! drives the converged
/// flag.
pub fn s_half_range(args: GenArgs, policy: &SeriesPolicy) -> Result<EvalResult, EvalError> {
    policy.validate()?;
    let GenArgs { x, t } = args;
    let mut acc = CompensatedSum::new();
    let mut max_abs = 0.0f64;
    let mut err = f64::INFINITY;
    let mut converged = false;
    let mut used = 0usize;

    // tail factor a^{n+1}/(n+1)! with a = |t| x / 2, advanced alongside n
    let a = t.abs() * x / 2.0;
    let two_cosh = (x.exp() + (-x).exp()).min(f64::MAX);
    let mut tail_factor = a; // a^{n+1}/(n+1)! at n = 0

    let mut tn = 1.0f64;
    for n in 0..policy.max_terms {
        let inner = bessel_i(n as u32, x, policy)?;
        let term = tn * inner.value;
        acc.add(term);
        used = n + 1;
        max_abs = max_abs.max(term.abs());
        // certified bound on the dropped tail, valid once n+1 >= 2a
        let tail_bound = if (n + 1) as f64 >= 2.0 * a {
            two_cosh * tail_factor
        } else {
            f64::INFINITY
        };
        let tol = f64::max(policy.rel_tol * acc.value().abs(), policy.abs_tol);
        if tail_bound <= tol {
            err = tail_bound + inner.err_estimate;
            converged = true;
            break;
        }
        err = term.abs();
        tn *= t;
        tail_factor *= a / (n + 2) as f64;
    }

    let value = acc.value();
    Ok(EvalResult {
        value,
        err_estimate: if err.is_finite() { err } else { f64::MAX },
        terms_used: used,
        converged,
        cancellation: max_abs / f64::max(value.abs(), policy.abs_tol.max(f64::MIN_POSITIVE)),
    })
}

/// Full-range generating function sum_{n=-inf}^{inf} t^n I_n(x) in closed
/// form: exp(x (t + 1/t) / 2).
pub fn gen_full_range(args: GenArgs) -> f64 {
    (args.x * (args.t + 1.0 / args.t) / 2.0).exp()
}

/// Weighted Laguerre sum sum_{n>=0} (-1)^n t^n L_n(x) / (n+m)! by direct
/// compensated summation (m = 0 is the classical Bessel relation).
///
/// The cancellation diagnostic folds in the worst intermediate term of each
/// inner L_n expansion; above 1e10 the result is marked non-converged.
pub fn laguerre_weighted_sum(
    m: u32,
    x: f64,
    t: f64,
    policy: &SeriesPolicy,
) -> Result<EvalResult, EvalError> {
    policy.validate()?;
    if !(x >= 0.0) {
        return Err(EvalError::Domain("laguerre_weighted_sum requires x >= 0"));
    }
    if !(t >= 0.0) {
        return Err(EvalError::Domain("laguerre_weighted_sum requires t >= 0"));
    }
    let mut acc = CompensatedSum::new();
    let mut max_abs = 0.0f64;
    let mut prev_abs = f64::INFINITY;
    let mut last = 0.0f64;
    let mut used = 0usize;
    let mut converged = false;

    let mut weight = 1.0 / factorial(m as usize); // t^n / (n+m)! with sign
    let e_half_x = (x / 2.0).exp();
    for n in 0..policy.max_terms {
        let inner = laguerre(n as u32, x, policy)?;
        let term = weight * inner.value;
        acc.add(term);
        used = n + 1;
        let abs = term.abs();
        max_abs = max_abs
            .max(abs)
            .max(weight.abs() * inner.cancellation * inner.value.abs().max(policy.abs_tol));
        // |L_n| <= e^{x/2} certifies the factorial tail
        let tail_bound = weight.abs() * t / (n + m as usize + 1) as f64 * e_half_x;
        let tol = f64::max(policy.rel_tol * acc.value().abs(), policy.abs_tol);
        last = abs;
        if n >= 1 && abs <= tol && abs <= prev_abs && tail_bound <= tol {
            converged = true;
            break;
        }
        prev_abs = abs;
        weight *= -t / (n + m as usize + 1) as f64;
    }

    let value = acc.value();
    let cancellation = max_abs / f64::max(value.abs(), policy.abs_tol.max(f64::MIN_POSITIVE));
    Ok(EvalResult {
        value,
        err_estimate: last,
        terms_used: used,
        converged: converged && cancellation <= 1e10,
        cancellation,
    })
}

/// Inner factor of the scaled product form: sum_k y^k n!/(k!(n+k)!),
/// all terms positive; multiplied by t^n/n! it gives t^n sum_k (x t)^k/(k!(n+k)!),
/// the regular evaluation of (t/x)^(n/2) I_n(2 sqrt(x t)).
pub(crate) fn scaled_bessel_inner(n: usize, y: f64, rel_tol: f64) -> f64 {
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    let mut k = 0usize;
    loop {
        term *= y / ((k + 1) as f64 * (n + k + 1) as f64);
        sum += term;
        k += 1;
        if term <= rel_tol * sum || k > 600 {
            return sum;
        }
    }
}

/// Binomially weighted Bessel tail
/// sum_{n>=m} [(n-1)!/((m-1)!(n-m)!)] (t/x)^(n/2) I_n(2 sqrt(x t)),
/// with each product evaluated through its x-regular power series
/// t^n sum_k (x t)^k / (k!(n+k)!), so small x is safe.
pub fn bessel_tail_weighted(
    m: u32,
    x: f64,
    t: f64,
    policy: &SeriesPolicy,
) -> Result<EvalResult, EvalError> {
    policy.validate()?;
    if m == 0 {
        return Err(EvalError::Domain("bessel_tail_weighted requires m >= 1"));
    }
    if !(x >= 0.0) || !(t >= 0.0) {
        return Err(EvalError::Domain(
            "bessel_tail_weighted requires x >= 0 and t >= 0",
        ));
    }
    let y = x * t;
    let m = m as usize;

    // outer weight t^n / n! started at n = m
    let mut weight = 1.0f64;
    for i in 1..=m {
        weight *= t / i as f64;
    }
    let mut binom = 1.0f64; // C(n-1, m-1) at n = m
    let mut acc = CompensatedSum::new();
    let mut max_abs = 0.0f64;
    let mut prev_abs = f64::INFINITY;
    let mut last = 0.0f64;
    let mut used = 0usize;
    let mut converged = false;

    for n in m..(m + policy.max_terms) {
        let term = binom * weight * scaled_bessel_inner(n, y, policy.rel_tol);
        acc.add(term);
        used = n - m + 1;
        let abs = term.abs();
        max_abs = max_abs.max(abs);
        let tol = f64::max(policy.rel_tol * acc.value().abs(), policy.abs_tol);
        last = abs;
        if n > m && abs <= tol && abs <= prev_abs {
            converged = true;
            break;
        }
        prev_abs = abs;
        binom *= n as f64 / (n + 1 - m) as f64;
        weight *= t / (n + 1) as f64;
    }

    let value = acc.value();
    Ok(EvalResult {
        value,
        err_estimate: last,
        terms_used: used,
        converged,
        cancellation: max_abs / f64::max(value.abs(), policy.abs_tol.max(f64::MIN_POSITIVE)),
    })
}
