//! Capacity and outage figures of the best relay under the `exp(−u(γ))` approximation.
//!
//! Every rate carries the factor ½ of two-hop transmission. Note that the approximation
//! puts an atom of mass `exp(−u(0))` at `γ = 0` for small networks; it contributes nothing
//! to the capacity integrals but does show up as a floor in the outage probability.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evt::{approx_max_pdf, u_of_gamma};
use crate::scenario::LinkParams;
use crate::special_fn::{adaptive_quad_with, QuadOptions};

/// `u(γ)` level at which the integration range is cut.
pub const TAIL_CUTOFF: f64 = 1e-10;

/// Ergodic capacity with its numerical diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErgodicCapacity {
    /// `½ ∫ log2(1 + γ) f(γ) dγ` in bits/s/Hz.
    pub value: f64,
    /// Same quantity from `½/ln 2 · ∫ (1 − F(γ)) / (1 + γ) dγ`.
    pub tail_form: f64,
    /// Quadrature error plus a bound on the truncated tail.
    pub error_bound: f64,
    pub upper_limit: f64,
}

/// Smallest `γ` (to bisection accuracy) with `u(γ) ≤ level`.
pub fn tail_cutoff(links: &[LinkParams], level: f64) -> f64 {
    if u_of_gamma(links, 0.0) <= level {
        return 0.0;
    }
    let mut hi = 1.0;
    while u_of_gamma(links, hi) > level {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= 1e-12 * hi {
            break;
        }
        if u_of_gamma(links, mid) > level {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

pub fn ergodic_capacity_eval(links: &[LinkParams]) -> Result<ErgodicCapacity> {
    if links.is_empty() {
        return Err(Error::domain("ergodic_capacity", "no links"));
    }
    let upper = tail_cutoff(links, TAIL_CUTOFF);
    let u_upper = u_of_gamma(links, upper);
    let theta_min = links.iter().map(|l| l.theta).fold(f64::INFINITY, f64::min);
    // ∫_G^∞ (1 − e^{−u}) / (1 + γ) ≤ u(G) / (θ_min (1 + G))
    let tail_bound = 0.5 / std::f64::consts::LN_2 * u_upper / (theta_min * (1.0 + upper));
    if upper == 0.0 {
        return Ok(ErgodicCapacity {
            value: 0.0,
            tail_form: 0.0,
            error_bound: tail_bound,
            upper_limit: 0.0,
        });
    }
    let opts = QuadOptions {
        abs_tol: 1e-10,
        rel_tol: 1e-11,
        max_subdivisions: 4000,
    };
    let pdf_form = adaptive_quad_with(
        |g| (1.0 + g).log2() * approx_max_pdf(links, g),
        0.0,
        upper,
        &opts,
    )?;
    let tail_form = adaptive_quad_with(
        |g| -(-u_of_gamma(links, g)).exp_m1() / (1.0 + g),
        0.0,
        upper,
        &opts,
    )?;
    // integration by parts on [0, G] leaves a boundary term log2(1 + G)(1 − F(G))
    let boundary = (1.0 + upper).log2() * -(-u_upper).exp_m1();
    let value = 0.5 * pdf_form.value;
    let tail_value = 0.5 * (tail_form.value / std::f64::consts::LN_2 - boundary);
    Ok(ErgodicCapacity {
        value,
        tail_form: tail_value,
        error_bound: 0.5 * pdf_form.error + tail_bound + 0.5 * boundary,
        upper_limit: upper,
    })
}

/// Ergodic capacity of the best relay in bits/s/Hz.
pub fn ergodic_capacity(links: &[LinkParams]) -> Result<f64> {
    ergodic_capacity_eval(links).map(|c| c.value)
}

/// `(1 − α) · C`. The links must have been built with the same `α`.
pub fn throughput(links: &[LinkParams], ts_factor: f64) -> Result<f64> {
    check_ts_factor(ts_factor)?;
    Ok((1.0 - ts_factor) * ergodic_capacity(links)?)
}

fn check_ts_factor(ts_factor: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&ts_factor) {
        return Err(Error::domain(
            "throughput",
            format!("ts factor must lie in [0, 1], got {ts_factor}"),
        ));
    }
    Ok(())
}

fn check_threshold(function: &'static str, gamma_th: f64) -> Result<()> {
    if !(gamma_th > 0.0) {
        return Err(Error::domain(
            function,
            format!("threshold must be positive, got {gamma_th}"),
        ));
    }
    Ok(())
}

/// `P(max < γ_th) ≈ exp(−u(γ_th))`.
pub fn outage_probability(links: &[LinkParams], gamma_th: f64) -> Result<f64> {
    check_threshold("outage_probability", gamma_th)?;
    Ok((-u_of_gamma(links, gamma_th)).exp())
}

/// `½ log2(1 + γ_th) · (1 − P_out)`.
pub fn outage_capacity(links: &[LinkParams], gamma_th: f64) -> Result<f64> {
    let p = outage_probability(links, gamma_th)?;
    Ok(0.5 * (1.0 + gamma_th).log2() * (1.0 - p))
}

/// All four figures at one operating point. Field order is the CSV column order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapacityReport {
    pub ergodic_capacity: f64,
    pub throughput: f64,
    pub outage_probability: f64,
    pub outage_capacity: f64,
    pub gamma_th: f64,
    pub quadrature_error_bound: f64,
}

impl CapacityReport {
    pub fn compute(links: &[LinkParams], ts_factor: f64, gamma_th: f64) -> Result<Self> {
        check_ts_factor(ts_factor)?;
        let c = ergodic_capacity_eval(links)?;
        let p = outage_probability(links, gamma_th)?;
        Ok(Self {
            ergodic_capacity: c.value,
            throughput: (1.0 - ts_factor) * c.value,
            outage_probability: p,
            outage_capacity: 0.5 * (1.0 + gamma_th).log2() * (1.0 - p),
            gamma_th,
            quadrature_error_bound: c.error_bound,
        })
    }

    pub fn write_csv<W: Write>(reports: &[CapacityReport], writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        for r in reports {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    }
}
