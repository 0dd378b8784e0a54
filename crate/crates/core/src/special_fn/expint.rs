//! Generalized exponential integral `E_n(x) = ∫_1^∞ e^{-xt} t^{-n} dt`.
//!
//! Single values use the power series for `x <= 1` and a modified-Lentz continued
//! fraction above that; both hold for every order. Runs of consecutive orders (what the
//! link CDF series consumes) are filled by recurrence from one directly evaluated anchor:
//! downward for orders below `x`, upward for orders above it. Each direction only damps
//! rounding error inside its own region.

use serde::{Deserialize, Serialize};

use super::quad::{adaptive_quad_with, QuadOptions};
use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const MAX_ITER: usize = 10_000;
const FP_MIN: f64 = 1e-300;

/// Arguments above this give `e^{-x}` below the smallest normal double.
const UNDERFLOW_X: f64 = 745.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpIntMethod {
    ClosedForm,
    Series,
    ContinuedFraction,
    Recurrence,
    Quadrature,
    Asymptotic,
}

/// One evaluation of `E_n(x)` together with the route that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpIntEval {
    pub order: u32,
    pub argument: f64,
    pub value: f64,
    pub method: ExpIntMethod,
}

fn check_domain(n: u32, x: f64) -> Result<()> {
    if x.is_nan() || x < 0.0 {
        return Err(Error::domain(
            "exp_integral",
            format!("argument must be nonnegative, got {x}"),
        ));
    }
    if x == 0.0 && n <= 1 {
        return Err(Error::domain("exp_integral", format!("E_{n}(0) diverges")));
    }
    Ok(())
}

/// `E_n(x)` for `x > 0`, or `x = 0` with `n >= 2`.
pub fn exp_integral(n: u32, x: f64) -> Result<f64> {
    exp_integral_eval(n, x).map(|e| e.value)
}

pub fn exp_integral_eval(n: u32, x: f64) -> Result<ExpIntEval> {
    check_domain(n, x)?;
    let done = |value, method| ExpIntEval {
        order: n,
        argument: x,
        value,
        method,
    };
    if x == 0.0 {
        return Ok(done(1.0 / (n as f64 - 1.0), ExpIntMethod::ClosedForm));
    }
    if n == 0 {
        return Ok(done((-x).exp() / x, ExpIntMethod::ClosedForm));
    }
    if x > UNDERFLOW_X {
        return Ok(done(0.0, ExpIntMethod::ClosedForm));
    }
    let direct = if x <= 1.0 {
        series(n, x).map(|v| (v, ExpIntMethod::Series))
    } else {
        continued_fraction(n, x).map(|v| (v, ExpIntMethod::ContinuedFraction))
    };
    match direct {
        Some((v, m)) => Ok(done(v, m)),
        None => exp_integral_quadrature(n, x).map(|v| done(v, ExpIntMethod::Quadrature)),
    }
}

fn series(n: u32, x: f64) -> Option<f64> {
    let nm1 = n as i64 - 1;
    let mut ans = if nm1 != 0 {
        1.0 / nm1 as f64
    } else {
        -x.ln() - EULER_GAMMA
    };
    let mut fact = 1.0;
    for i in 1..MAX_ITER as i64 {
        fact *= -x / i as f64;
        let del = if i != nm1 {
            -fact / (i - nm1) as f64
        } else {
            let psi = -EULER_GAMMA + (1..=nm1).map(|k| 1.0 / k as f64).sum::<f64>();
            fact * (-x.ln() + psi)
        };
        ans += del;
        if del.abs() < ans.abs() * f64::EPSILON {
            return Some(ans);
        }
    }
    None
}

fn continued_fraction(n: u32, x: f64) -> Option<f64> {
    let nm1 = n as f64 - 1.0;
    let mut b = x + n as f64;
    let mut c = 1.0 / FP_MIN;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let i = i as f64;
        let a = -i * (nm1 + i);
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < f64::EPSILON {
            return Some(h * (-x).exp());
        }
    }
    None
}

/// Reference evaluation of `E_n(x)` by adaptive quadrature.
///
/// Uses `t = e^w`, which turns the slowly decaying tail at small `x` into a
/// double-exponential cutoff on a finite interval.
pub fn exp_integral_quadrature(n: u32, x: f64) -> Result<f64> {
    check_domain(n, x)?;
    if x == 0.0 {
        return Ok(1.0 / (n as f64 - 1.0));
    }
    if x > UNDERFLOW_X {
        return Ok(0.0);
    }
    let upper = (760.0 / x).ln().max(1.0);
    let one_minus_n = 1.0 - n as f64;
    let integrand = |w: f64| (-x * w.exp() + one_minus_n * w).exp();
    let opts = QuadOptions {
        abs_tol: 0.0,
        rel_tol: 1e-13,
        max_subdivisions: 4000,
    };
    adaptive_quad_with(integrand, 0.0, upper, &opts).map(|r| r.value)
}

/// `E_0(x), E_1(x), …, E_{max_order}(x)` for `x > 0`.
///
/// The anchor order is `min(max_order, floor(x))`; orders below it come from the downward
/// recurrence `E_k = (e^{-x} - k E_{k+1}) / x` and orders above from the upward recurrence
/// `E_{k+1} = (e^{-x} - x E_k) / k`.
pub fn exp_integral_sequence(x: f64, max_order: u32) -> Result<Vec<f64>> {
    if x.is_nan() || x <= 0.0 {
        return Err(Error::domain(
            "exp_integral_sequence",
            format!("argument must be positive, got {x}"),
        ));
    }
    let len = max_order as usize + 1;
    if x > UNDERFLOW_X {
        return Ok(vec![0.0; len]);
    }
    let mut out = vec![0.0; len];
    let emx = (-x).exp();
    let anchor = (x.floor() as u32).min(max_order).max(1.min(max_order));
    out[anchor as usize] = exp_integral(anchor, x)?;
    for k in (0..anchor).rev() {
        out[k as usize] = (emx - k as f64 * out[k as usize + 1]) / x;
    }
    for k in anchor..max_order {
        let k = k as usize;
        out[k + 1] = (emx - x * out[k]) / k as f64;
    }
    out[0] = emx / x;
    Ok(out)
}

/// Partial sum of the large-argument expansion
/// `E_n(x) ~ e^{-x}/x · Σ_k (-1)^k n(n+1)…(n+k-1) / x^k` with `num_terms` terms.
///
/// The expansion diverges for fixed `x`; it is only useful when the terms shrink,
/// roughly while `n + k < x`.
pub fn exp_integral_asymptotic(n: u32, x: f64, num_terms: usize) -> f64 {
    let mut term = 1.0;
    let mut sum = 0.0;
    for k in 0..num_terms {
        if k > 0 {
            term *= -(n as f64 + k as f64 - 1.0) / x;
        }
        sum += term;
    }
    (-x).exp() / x * sum
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn e0_closed_form() {
        let v = exp_integral(0, 2.0).unwrap();
        assert!((v - (-2.0f64).exp() / 2.0).abs() < 1e-16);
        assert!((v - 0.067_667_641_618_306_35).abs() < 1e-15);
    }

    #[test]
    fn order_five_at_zero() {
        assert_eq!(exp_integral(5, 0.0).unwrap(), 0.25);
    }

    #[test]
    fn e1_at_one_matches_frozen_quadrature() {
        // 50-digit quadrature of e^{-t}/t on [1, inf)
        let golden = 0.219_383_934_395_520_273_677_163_8;
        assert!(rel(exp_integral(1, 1.0).unwrap(), golden) < 1e-14);
        assert!(rel(exp_integral_quadrature(1, 1.0).unwrap(), golden) < 1e-12);
    }

    #[test]
    fn domain_errors() {
        assert!(exp_integral(1, 0.0).is_err());
        assert!(exp_integral(0, 0.0).is_err());
        assert!(exp_integral(3, -1.0).is_err());
        assert!(exp_integral(3, f64::NAN).is_err());
    }

    #[test]
    fn method_tags() {
        assert_eq!(
            exp_integral_eval(0, 1.0).unwrap().method,
            ExpIntMethod::ClosedForm
        );
        assert_eq!(
            exp_integral_eval(3, 0.5).unwrap().method,
            ExpIntMethod::Series
        );
        assert_eq!(
            exp_integral_eval(3, 5.0).unwrap().method,
            ExpIntMethod::ContinuedFraction
        );
    }

    #[test]
    fn asymptotic_leading_term() {
        for n in [0, 1, 7] {
            let x = 3.5;
            assert_eq!(exp_integral_asymptotic(n, x, 1), (-x).exp() / x);
        }
    }

    #[test]
    fn asymptotic_is_good_at_large_x() {
        let exact = exp_integral(1, 50.0).unwrap();
        assert!(rel(exp_integral_asymptotic(1, 50.0, 3), exact) < 1e-3);
    }

    #[test]
    fn asymptotic_fails_at_small_x() {
        let exact = exp_integral(2, 0.5).unwrap();
        assert!(rel(exp_integral_asymptotic(2, 0.5, 10), exact) > 0.1);
    }

    #[test]
    fn sequence_matches_direct_evaluation() {
        for &x in &[1e-6, 0.3, 1.0, 2.5, 17.2, 49.0, 120.0] {
            let seq = exp_integral_sequence(x, 60).unwrap();
            for (k, v) in seq.iter().enumerate() {
                let direct = exp_integral(k as u32, x).unwrap();
                assert!(rel(*v, direct) < 1e-12, "x={x} k={k}: {v} vs {direct}");
            }
        }
    }

    #[test]
    fn sequence_of_order_zero_only() {
        let seq = exp_integral_sequence(0.7, 0).unwrap();
        assert_eq!(seq.len(), 1);
        assert!(rel(seq[0], (-0.7f64).exp() / 0.7) < 1e-15);
    }
}
