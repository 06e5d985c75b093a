use crate::error::EvalError;
use crate::policy::{EvalResult, SeriesPolicy};

/// Neumaier-compensated accumulator. The compensation term is carried
/// separately so that alternating sums do not lose the low-order bits of
/// partially cancelled partials.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Compensated partial sum of `terms` under `policy`.
///
/// Stops at the first k >= 1 where |term_k| <= max(rel_tol * |partial|, abs_tol)
/// and |term_k| <= |term_{k-1}| (tail-decay guard), or at `max_terms` with
/// `converged = false`. An exhausted generator is an exact finite sum.
pub fn sum_series<I>(terms: I, policy: &SeriesPolicy) -> Result<EvalResult, EvalError>
where
    I: IntoIterator<Item = f64>,
{
    policy.validate()?;
    let mut acc = CompensatedSum::new();
    let mut max_abs_term = 0.0f64;
    let mut prev_abs = f64::INFINITY;
    let mut last_abs = 0.0f64;
    let mut used = 0usize;
    let mut converged = false;

    for (k, term) in terms.into_iter().enumerate() {
        if !term.is_finite() {
            return Err(EvalError::NonFiniteTerm { index: k });
        }
        if k >= policy.max_terms {
            break;
        }
        acc.add(term);
        used = k + 1;
        let abs = term.abs();
        max_abs_term = max_abs_term.max(abs);
        let tol = f64::max(policy.rel_tol * acc.value().abs(), policy.abs_tol);
        if k >= 1 && abs <= tol && abs <= prev_abs {
            last_abs = abs;
            converged = true;
            break;
        }
        prev_abs = abs;
        last_abs = abs;
    }

    // Generator ran dry before the guard tripped: the sum is exact.
    let exhausted_exact = !converged && used < policy.max_terms;
    let value = acc.value();
    Ok(EvalResult {
        value,
        err_estimate: if exhausted_exact { 0.0 } else { last_abs },
        terms_used: used,
        converged: converged || exhausted_exact,
        cancellation: max_abs_term / f64::max(value.abs(), policy.abs_tol.max(f64::MIN_POSITIVE)),
    })
}

/// n! as f64; exact through n = 22, correctly rounded to ~1 ulp afterwards.
/// Overflows to infinity for n > 170.
pub fn factorial(n: usize) -> f64 {
    let mut f = 1.0f64;
    for i in 2..=n {
        f *= i as f64;
    }
    f
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_term_sum() {
        let r = sum_series([1.0, 0.0, 0.0, 0.0], &SeriesPolicy::default()).unwrap();
        assert_eq!(r.value, 1.0);
        assert!(r.converged);
    }

    #[test]
    fn exponential_series_matches_exp() {
        // terms 1/k! sum to e
        let mut term = 1.0;
        let mut k = 0usize;
        let terms = std::iter::from_fn(move || {
            let t = term;
            k += 1;
            term /= k as f64;
            Some(t)
        });
        let r = sum_series(terms, &SeriesPolicy::default()).unwrap();
        assert!(r.converged);
        assert!((r.value - 1.0f64.exp()).abs() < 1e-15, "got {}", r.value);
    }

    #[test]
    fn max_terms_cutoff_reports_unconverged() {
        let r = sum_series(std::iter::repeat(1.0), &SeriesPolicy::default()).unwrap();
        assert!(!r.converged);
        assert_eq!(r.terms_used, 500);
    }

    #[test]
    fn geometric_half_matches_closed_form() {
        let terms = (0..).map(|k| 0.5f64.powi(k));
        let r = sum_series(terms, &SeriesPolicy::default()).unwrap();
        assert!(r.converged);
        assert!((r.value - 2.0).abs() <= 1e-14 * 2.0, "got {}", r.value);
    }

    #[test]
    fn non_finite_term_names_index() {
        let r = sum_series([1.0, 0.5, f64::NAN], &SeriesPolicy::default());
        assert_eq!(r.unwrap_err(), EvalError::NonFiniteTerm { index: 2 });
    }

    #[test]
    fn alternating_cancellation_at_least_one() {
        // alternating geometric, ratio -r: sum = 1/(1+r) < 1 = max |term|
        for r in [0.3f64, 0.5, 0.9] {
            let terms = (0..).map(move |k| (-r).powi(k));
            let res = sum_series(terms, &SeriesPolicy::default()).unwrap();
            assert!(res.value != 0.0);
            assert!(res.cancellation >= 1.0);
        }
    }

    #[test]
    fn finite_generator_is_exact() {
        let r = sum_series([2.0, 3.0, 4.0], &SeriesPolicy::default()).unwrap();
        assert_eq!(r.value, 9.0);
        assert!(r.converged);
        assert_eq!(r.err_estimate, 0.0);
    }

    #[test]
    fn factorial_values() {
        assert_eq!(factorial(0), 1.0);
        assert_eq!(factorial(5), 120.0);
        assert_eq!(factorial(10), 3_628_800.0);
    }
}
