//! Independent-oracle checks: every derived expected value is recomputed
//! here by a route that shares nothing with the implementation it checks
//! (quadrature of the defining integrals, fixed-length direct sums), then
//! compared against the frozen constants asserted in the unit tests.

use marq_core::kernels::{erf, erfi, sum_series, upper_gamma_int};
use marq_core::marcum::{marcum_q_series, MarcumArgs};
use marq_core::quadrature::{
    integrate_finite, integrate_semi_infinite, ExpEnvelope, QuadratureSpec,
};
use marq_core::special::{
    bessel_i, bessel_i_integral, laguerre, laguerre_integral, s_half_range, GenArgs,
};
use marq_core::SeriesPolicy;

fn policy() -> SeriesPolicy {
    SeriesPolicy::default()
}
fn spec() -> QuadratureSpec {
    QuadratureSpec::default()
}

/// 40-term direct evaluation of the modified Bessel series; the oracle the
/// spec pins for I_n values.
fn bessel_i_oracle(n: u32, x: f64) -> f64 {
    let mut term = 1.0f64;
    for i in 1..=n {
        term *= x / 2.0 / i as f64;
    }
    let mut sum = 0.0;
    for k in 0..40u32 {
        if k > 0 {
            term *= (x / 2.0) * (x / 2.0) / (k as f64 * (n + k) as f64);
        }
        sum += term;
    }
    sum
}

/// 40-term direct evaluation of the J series.
fn bessel_j_oracle(m: u32, x: f64) -> f64 {
    let mut term = 1.0f64;
    for i in 1..=m {
        term *= x / 2.0 / i as f64;
    }
    let mut sum = 0.0;
    for k in 0..40u32 {
        if k > 0 {
            term *= -(x / 2.0) * (x / 2.0) / (k as f64 * (m + k) as f64);
        }
        sum += term;
    }
    sum
}

#[test]
fn erf_against_quadrature_of_defining_integral() {
    let two_over_sqrt_pi = 2.0 / std::f64::consts::PI.sqrt();
    let oracle = integrate_finite(|u: f64| two_over_sqrt_pi * (-u * u).exp(), 0.0, 1.0, &spec())
        .unwrap()
        .value;
    let series = erf(1.0, &policy()).unwrap().value;
    assert!((series - oracle).abs() < 1e-13, "{series} vs {oracle}");
    assert!((oracle - 0.842_700_792_949_714_9).abs() < 1e-12);
}

#[test]
fn erf_series_vs_quadrature_on_pseudorandom_grid() {
    // 100 deterministic pseudo-random z in [0, 3]
    let mut state = 0x2545F4914F6CDD1Du64;
    for _ in 0..100 {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let z = 3.0 * (state >> 11) as f64 / (1u64 << 53) as f64;
        let series = erf(z, &policy()).unwrap().value;
        let two_over_sqrt_pi = 2.0 / std::f64::consts::PI.sqrt();
        let quad = integrate_finite(|u: f64| two_over_sqrt_pi * (-u * u).exp(), 0.0, z, &spec())
            .unwrap()
            .value;
        assert!(
            (series - quad).abs() <= 1e-12 * quad.abs().max(1e-30),
            "z={z}: {series} vs {quad}"
        );
    }
}

#[test]
fn erfi_against_quadrature() {
    let two_over_sqrt_pi = 2.0 / std::f64::consts::PI.sqrt();
    let oracle = integrate_finite(|u: f64| two_over_sqrt_pi * (u * u).exp(), 0.0, 1.0, &spec())
        .unwrap()
        .value;
    let series = erfi(1.0, &policy()).unwrap().value;
    assert!((series - oracle).abs() < 1e-13);
    assert!((oracle - 1.650_425_758_797_542_9).abs() < 1e-12);
}

#[test]
fn upper_gamma_against_quadrature() {
    // Gamma(3, 1) = int_1^inf u^2 e^{-u} du
    let env = ExpEnvelope::poly_exp(2, 1.0);
    let oracle = integrate_semi_infinite(|u: f64| u * u * (-u).exp(), 1.0, env, &spec())
        .unwrap()
        .value;
    let closed = upper_gamma_int(3, 1.0).unwrap().value;
    assert!((closed - oracle).abs() < 1e-11, "{closed} vs {oracle}");
}

#[test]
fn chebyshev_weighted_integral_matches_bessel_series() {
    // int_{-1}^{1} (1-mu^2)^{1/2} exp(-mu) dmu = pi I_1(1), evaluated after
    // the sin substitution (cos^2 theta integrand)
    use std::f64::consts::FRAC_PI_2;
    let quad = integrate_finite(
        |theta: f64| {
            let c = theta.cos();
            c * c * (-theta.sin()).exp()
        },
        -FRAC_PI_2,
        FRAC_PI_2,
        &spec(),
    )
    .unwrap()
    .value;
    let oracle = std::f64::consts::PI * bessel_i_oracle(1, 1.0);
    assert!((quad - oracle).abs() < 1e-12, "{quad} vs {oracle}");
    assert!((quad - 1.775_499_689_212_181).abs() < 1e-12);
}

#[test]
fn bessel_values_against_forty_term_oracle() {
    for (n, x, frozen) in [
        (0u32, 1.0, 1.266_065_877_752_008_3),
        (1, 1.0, 0.565_159_103_992_485),
    ] {
        let oracle = bessel_i_oracle(n, x);
        let series = bessel_i(n, x, &policy()).unwrap().value;
        assert!((series - oracle).abs() < 1e-15 * oracle);
        assert!((oracle - frozen).abs() < 1e-15 * oracle);
    }
    let j = bessel_j_oracle(0, 2.0);
    assert!((j - 0.223_890_779_141_235_67).abs() < 1e-15);
}

#[test]
fn bessel_cross_representation_grid() {
    // |series - integral| <= combined error estimates
    for &n in &[0u32, 1, 2, 5] {
        for &x in &[0.5, 1.0, 5.0, 10.0] {
            let series = bessel_i(n, x, &policy()).unwrap();
            let integral = bessel_i_integral(n, x, &spec()).unwrap();
            let bound =
                (series.err_estimate + integral.err_estimate).max(1e-13 * series.value.abs());
            assert!(
                (series.value - integral.value).abs() <= bound,
                "n={n} x={x}: {} vs {} (bound {bound})",
                series.value,
                integral.value
            );
        }
    }
}

#[test]
fn laguerre_cross_representation_grid() {
    // 1e-11 absolute floor documents the quadrature noise at the L_1(1) root
    for n in 0..=10u32 {
        for &x in &[0.1, 1.0, 5.0] {
            let direct = laguerre(n, x, &policy()).unwrap();
            let integral = laguerre_integral(n, x, &spec()).unwrap();
            let bound = (direct.err_estimate + integral.err_estimate).max(1e-11);
            assert!(
                (direct.value - integral.value).abs() <= bound,
                "n={n} x={x}: {} vs {} (bound {bound})",
                direct.value,
                integral.value
            );
        }
    }
}

#[test]
fn half_range_sum_against_marcum_series_point() {
    // S(1, 0.5) = exp(1.25) (1 - Q_0(sqrt 2, sqrt 0.5))
    let s = s_half_range(GenArgs::new(1.0, 0.5).unwrap(), &policy()).unwrap();
    let q0 = marcum_q_series(
        MarcumArgs::new(0, 2.0f64.sqrt(), 0.5f64.sqrt()).unwrap(),
        &policy(),
    )
    .unwrap();
    let rhs = 1.25f64.exp() * (1.0 - q0.value);
    assert!((s.value - rhs).abs() < 1e-13 * rhs, "{} vs {rhs}", s.value);
}

#[test]
fn exponential_series_against_builtin() {
    let mut term = 1.0;
    let mut k = 0usize;
    let terms = std::iter::from_fn(move || {
        let t = term;
        k += 1;
        term /= k as f64;
        Some(t)
    });
    let r = sum_series(terms, &policy()).unwrap();
    assert!((r.value - std::f64::consts::E).abs() < 4.0 * f64::EPSILON);
}
