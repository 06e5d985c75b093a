use crate::error::EvalError;
use crate::kernels::series::sum_series;
use crate::policy::{EvalResult, SeriesPolicy};

use std::f64::consts::FRAC_2_SQRT_PI;

/// Largest |y| for which exp(y^2) stays inside the f64 range; erfi grows like
/// exp(y^2)/(y sqrt(pi)), so beyond this the result overflows.
pub const ERFI_OVERFLOW_THRESHOLD: f64 = 26.615;

/// Error function (2/sqrt(pi)) * int_0^z exp(-u^2) du.
///
/// Maclaurin series for |z| <= 3, complementary continued fraction for
/// |z| > 3. Odd symmetry is applied as a sign fold, so erf(-z) == -erf(z)
/// exactly.
pub fn erf(z: f64, policy: &SeriesPolicy) -> Result<EvalResult, EvalError> {
    policy.validate()?;
    if !z.is_finite() {
        return Err(EvalError::Domain("erf requires finite z"));
    }
    let a = z.abs();
    let mut r = if a <= 3.0 {
        erf_maclaurin(a, policy)?
    } else {
        erfc_continued_fraction(a, policy)
    };
    if z.is_sign_negative() {
        r.value = -r.value;
    }
    Ok(r)
}

fn erf_maclaurin(z: f64, policy: &SeriesPolicy) -> Result<EvalResult, EvalError> {
    // term_k = (2/sqrt(pi)) (-1)^k z^(2k+1) / (k! (2k+1))
    let z2 = z * z;
    let mut coeff = FRAC_2_SQRT_PI * z;
    let mut k = 0usize;
    let terms = std::iter::from_fn(move || {
        let t = coeff / (2 * k + 1) as f64;
        coeff *= -z2 / (k + 1) as f64;
        k += 1;
        Some(t)
    });
    sum_series(terms, policy)
}

/// erfc(x) for x > 0 via the Lentz evaluation of the classical continued
/// fraction sqrt(pi) exp(x^2) erfc(x) = 1/(x+ (1/2)/(x+ 1/(x+ (3/2)/(x+ ...)))),
/// returned as an erf result.
fn erfc_continued_fraction(x: f64, policy: &SeriesPolicy) -> EvalResult {
    let scale = (-x * x).exp() / std::f64::consts::PI.sqrt();
    if scale == 0.0 {
        // x >= ~27: erfc underflows entirely
        return EvalResult {
            value: 1.0,
            err_estimate: 1e-300,
            terms_used: 0,
            converged: true,
            cancellation: 1.0,
        };
    }
    let tiny = 1e-300;
    let mut f = x.max(tiny);
    let mut c = f;
    let mut d = 0.0f64;
    let mut used = 0usize;
    let mut delta = 0.0f64;
    for n in 1..policy.max_terms.max(60) {
        let an = n as f64 / 2.0;
        let bn = x;
        d = bn + an * d;
        if d == 0.0 {
            d = tiny;
        }
        c = bn + an / c;
        if c == 0.0 {
            c = tiny;
        }
        d = 1.0 / d;
        delta = c * d;
        f *= delta;
        used = n;
        if (delta - 1.0).abs() < policy.rel_tol {
            break;
        }
    }
    let erfc = scale / f;
    EvalResult {
        value: 1.0 - erfc,
        err_estimate: (delta - 1.0).abs() * erfc,
        terms_used: used,
        converged: (delta - 1.0).abs() < policy.rel_tol,
        cancellation: 1.0,
    }
}

/// Imaginary error function erfi(y) = (2/sqrt(pi)) sum_k y^(2k+1)/(k!(2k+1)).
/// All terms share the sign of y. Errors with `Range` once exp(y^2) would
/// leave the floating range (|y| > 26.615).
pub fn erfi(y: f64, policy: &SeriesPolicy) -> Result<EvalResult, EvalError> {
    policy.validate()?;
    if !y.is_finite() {
        return Err(EvalError::Domain("erfi requires finite y"));
    }
    if y.abs() > ERFI_OVERFLOW_THRESHOLD {
        return Err(EvalError::Range("erfi overflows for |y| > 26.615"));
    }
    let y2 = y * y;
    let mut coeff = FRAC_2_SQRT_PI * y;
    let mut k = 0usize;
    let terms = std::iter::from_fn(move || {
        let t = coeff / (2 * k + 1) as f64;
        coeff *= y2 / (k + 1) as f64;
        k += 1;
        Some(t)
    });
    sum_series(terms, policy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p() -> SeriesPolicy {
        SeriesPolicy::default()
    }

    #[test]
    fn erf_zero() {
        assert_eq!(erf(0.0, &p()).unwrap().value, 0.0);
    }

    #[test]
    fn erf_odd_fold_is_exact() {
        for z in [0.25, 1.3, 2.9, 4.2, 8.0] {
            let plus = erf(z, &p()).unwrap().value;
            let minus = erf(-z, &p()).unwrap().value;
            assert_eq!(plus + minus, 0.0);
            assert_eq!(minus, -plus);
        }
    }

    #[test]
    fn erf_one() {
        let r = erf(1.0, &p()).unwrap();
        assert!(r.converged);
        assert!((r.value - 0.842_700_792_949_714_9).abs() < 1e-15);
    }

    #[test]
    fn erf_continued_fraction_region() {
        // values checked against the complementary-series route at 30+ digits
        let r = erf(4.0, &p()).unwrap();
        assert!((r.value - 0.999_999_984_582_742_1).abs() < 1e-15);
        let r = erf(6.0, &p()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-15);
    }

    #[test]
    fn erfi_zero_and_odd() {
        assert_eq!(erfi(0.0, &p()).unwrap().value, 0.0);
        let plus = erfi(0.7, &p()).unwrap().value;
        let minus = erfi(-0.7, &p()).unwrap().value;
        assert_eq!(minus, -plus);
    }

    #[test]
    fn erfi_one() {
        let r = erfi(1.0, &p()).unwrap();
        assert!(r.converged);
        assert!((r.value - 1.650_425_758_797_542_9).abs() < 1e-14);
    }

    #[test]
    fn erfi_overflow_guard() {
        assert!(matches!(erfi(27.0, &p()), Err(EvalError::Range(_))));
        assert!(erfi(26.0, &p()).is_ok());
    }

    proptest! {
        #[test]
        fn erf_bounded_and_increasing(z1 in -4.0f64..4.0, dz in 1e-3f64..1.0) {
            let a = erf(z1, &p()).unwrap().value;
            let b = erf(z1 + dz, &p()).unwrap().value;
            prop_assert!(a.abs() < 1.0);
            prop_assert!(b > a);
        }
    }
}
