use crate::error::EvalError;
use crate::kernels::series::{factorial, CompensatedSum};
use crate::policy::EvalResult;

/// Upper incomplete gamma for integer order:
/// Gamma(k, z) = (k-1)! exp(-z) sum_{j=0}^{k-1} z^j / j!, exact finite form.
pub fn upper_gamma_int(k: u32, z: f64) -> Result<EvalResult, EvalError> {
    if k == 0 {
        return Err(EvalError::Domain("upper_gamma_int requires k >= 1"));
    }
    if !(z >= 0.0) {
        return Err(EvalError::Domain("upper_gamma_int requires z >= 0"));
    }
    if k > 171 {
        return Err(EvalError::Range("(k-1)! overflows f64 for k > 171"));
    }
    let mut acc = CompensatedSum::new();
    let mut term = 1.0f64;
    for j in 0..k as usize {
        if j > 0 {
            term *= z / j as f64;
        }
        acc.add(term);
    }
    let value = factorial(k as usize - 1) * (-z).exp() * acc.value();
    Ok(EvalResult {
        value,
        err_estimate: 2.0 * f64::EPSILON * value.abs(),
        terms_used: k as usize,
        converged: true,
        cancellation: 1.0,
    })
}
