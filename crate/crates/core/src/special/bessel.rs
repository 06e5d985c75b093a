use crate::error::EvalError;
use crate::kernels::{factorial, sum_series};
use crate::policy::{EvalResult, SeriesPolicy};
use crate::quadrature::{integrate_finite, QuadratureSpec};

/// Policy used for series nested inside quadrature integrands; tighter than
/// any caller-facing default so inner truncation never dominates.
pub(crate) fn integrand_policy() -> SeriesPolicy {
    SeriesPolicy {
        rel_tol: 1e-15,
        abs_tol: 1e-300,
        max_terms: 700,
    }
}

/// (x/2)^n / n! computed as a running product; stays in range whenever the
/// result does.
fn leading_term(n: u32, half_x: f64) -> f64 {
    let mut t = 1.0f64;
    for i in 1..=n {
        t *= half_x / i as f64;
    }
    t
}

/// Modified Bessel function of the first kind,
/// I_n(x) = sum_k (x/2)^(n+2k) / (k! (n+k)!). All terms are positive.
pub fn bessel_i(n: u32, x: f64, policy: &SeriesPolicy) -> Result<EvalResult, EvalError> {
    if !(x >= 0.0) {
        return Err(EvalError::Domain(
            "bessel_i requires x >= 0; fold negatives via I_n(-x) = (-1)^n I_n(x)",
        ));
    }
    let half = x / 2.0;
    let q = half * half;
    let mut term = leading_term(n, half);
    let mut k = 0usize;
    let terms = std::iter::from_fn(move || {
        let t = term;
        term *= q / ((k + 1) as f64 * (n as usize + k + 1) as f64);
        k += 1;
        Some(t)
    });
    sum_series(terms, policy)
}

/// Exponentially scaled e^(-x) I_n(x); the scale is folded into the leading
/// term so the product never overflows for x within the f64 exponent range.
pub fn bessel_i_scaled(n: u32, x: f64, policy: &SeriesPolicy) -> Result<EvalResult, EvalError> {
    if !(x >= 0.0) {
        return Err(EvalError::Domain("bessel_i_scaled requires x >= 0"));
    }
    let half = x / 2.0;
    let q = half * half;
    let mut term = (-x).exp() * leading_term(n, half);
    if x > 0.0 && term == 0.0 {
        // leading term underflowed; rebuild it in log space
        let mut ln = -x;
        for i in 1..=n {
            ln += (half / i as f64).ln();
        }
        term = ln.exp();
    }
    let mut k = 0usize;
    let terms = std::iter::from_fn(move || {
        let t = term;
        term *= q / ((k + 1) as f64 * (n as usize + k + 1) as f64);
        k += 1;
        Some(t)
    });
    sum_series(terms, policy)
}

/// I_n(x) through its integral representation,
/// (2x)^n n! / (pi (2n)!) * int_{-1}^{1} (1-mu^2)^(n-1/2) exp(-x mu) dmu,
/// evaluated after the mu = sin(theta) substitution:
/// prefactor * int_{-pi/2}^{pi/2} cos(theta)^(2n) exp(-x sin(theta)) dtheta.
pub fn bessel_i_integral(n: u32, x: f64, spec: &QuadratureSpec) -> Result<EvalResult, EvalError> {
    use std::f64::consts::{FRAC_PI_2, PI};
    // (2x)^n n!/(2n)! = prod_{i=1..n} 2x/(n+i)
    let mut prefactor = 1.0 / PI;
    for i in 1..=n {
        prefactor *= 2.0 * x / (n + i) as f64;
    }
    let n_i32 = n as i32;
    let mut r = integrate_finite(
        |theta: f64| {
            let c = theta.cos();
            c.powi(2 * n_i32) * (-x * theta.sin()).exp()
        },
        -FRAC_PI_2,
        FRAC_PI_2,
        spec,
    )?;
    r.value *= prefactor;
    r.err_estimate *= prefactor.abs();
    Ok(r)
}

/// Bessel function of the first kind,
/// J_m(x) = sum_k (-1)^k (x/2)^(m+2k) / (k! (m+k)!), compensated.
///
/// The alternating series loses digits as x grows; a cancellation diagnostic
/// above 1e12 marks the result non-converged.
pub fn bessel_j(m: u32, x: f64, policy: &SeriesPolicy) -> Result<EvalResult, EvalError> {
    if !(x >= 0.0) {
        return Err(EvalError::Domain("bessel_j requires x >= 0"));
    }
    let half = x / 2.0;
    let q = -half * half;
    let mut term = leading_term(m, half);
    let mut k = 0usize;
    let terms = std::iter::from_fn(move || {
        let t = term;
        term *= q / ((k + 1) as f64 * (m as usize + k + 1) as f64);
        k += 1;
        Some(t)
    });
    let mut r = sum_series(terms, policy)?;
    if r.cancellation > 1e12 {
        r.converged = false;
    }
    Ok(r)
}

/// J_m(2 sqrt(y)) / y^(m/2) = sum_k (-1)^k y^k / (k! (m+k)!), the form that is
/// regular at y = 0; this is what the damped integral representations need.
pub fn bessel_j_ratio(m: u32, y: f64, policy: &SeriesPolicy) -> Result<EvalResult, EvalError> {
    if !(y >= 0.0) {
        return Err(EvalError::Domain("bessel_j_ratio requires y >= 0"));
    }
    if m > 170 {
        return Err(EvalError::Range("1/m! underflows for m > 170"));
    }
    let mut term = 1.0 / factorial(m as usize);
    let mut k = 0usize;
    let terms = std::iter::from_fn(move || {
        let t = term;
        term *= -y / ((k + 1) as f64 * (m as usize + k + 1) as f64);
        k += 1;
        Some(t)
    });
    sum_series(terms, policy)
}

/// J_m(z) by Miller's downward recurrence with the Neumann normalization
/// J_0 + 2 sum_{k>=1} J_{2k} = 1. The alternating power series loses a digit
/// per unit of z past ~10; this route keeps full precision for the moderate
/// arguments the damped integrands reach.
fn bessel_j_miller(m: u32, z: f64) -> f64 {
    let start = {
        let s = z.max(m as f64) + 1.5 * z.sqrt() + 30.0;
        (s as usize + 1) & !1usize
    };
    let tox = 2.0 / z;
    let mut above = 0.0f64; // J_{k+1}
    let mut current = 1.0e-30f64; // J_k
    let mut norm = 0.0f64;
    let mut target = 0.0f64;
    for k in (1..=start).rev() {
        let below = k as f64 * tox * current - above;
        above = current;
        current = below;
        if current.abs() > 1e10 {
            current *= 1e-10;
            above *= 1e-10;
            norm *= 1e-10;
            target *= 1e-10;
        }
        let order = k - 1;
        if order % 2 == 0 {
            norm += if order == 0 { current } else { 2.0 * current };
        }
        if order == m as usize {
            target = current;
        }
    }
    target / norm
}

/// Below this y = (z/2)^2 the alternating series still holds ~11 digits;
/// beyond it the integrand evaluator switches to the Miller recurrence.
const J_RATIO_SERIES_MAX: f64 = 36.0;

/// Integrand-friendly variant: NaN signals failure to the quadrature layer.
pub(crate) fn bessel_j_ratio_value(m: u32, y: f64) -> f64 {
    if y <= J_RATIO_SERIES_MAX {
        bessel_j_ratio(m, y, &integrand_policy())
            .map(|r| r.value)
            .unwrap_or(f64::NAN)
    } else {
        bessel_j_miller(m, 2.0 * y.sqrt()) / y.powf(m as f64 / 2.0)
    }
}

pub(crate) fn bessel_i_scaled_value(n: u32, x: f64) -> f64 {
    bessel_i_scaled(n, x, &integrand_policy())
        .map(|r| r.value)
        .unwrap_or(f64::NAN)
}
