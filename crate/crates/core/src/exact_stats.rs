//! Exact distribution of the end-to-end SNR of one relay and of the best relay, plus
//! empirical CDFs and Kolmogorov–Smirnov distances.
//!
//! With `x = θγ` the per-link survival function has two equivalent forms:
//!
//! ```text
//! 1 − F(γ) = x Σ_k (−ν)^k / k! · E_k(x)                     (series)
//!          = ∫_0^∞ exp(−x − t − ν x / (x + t)) dt           (integral)
//! ```
//!
//! The series alternates and its terms peak near `k ≈ ν` with magnitude up to about
//! `e^{ν − x}`, so cancellation grows with `ν` (not with `νγ`). [`link_cdf_series`] sums it
//! with compensation and hands over to the integral when the rounding left by the
//! cancellation could exceed the requested tolerance.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::compensated::Neumaier;
use crate::error::{Error, Result};
use crate::scenario::LinkParams;
use crate::special_fn::{adaptive_quad_with, exp_integral_sequence, QuadOptions};

pub const SERIES_TOL: f64 = 1e-12;
pub const MAX_SERIES_TERMS: u32 = 200;

/// Where the values of a [`CdfCurve`] came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    LinkSeries,
    LinkQuadrature,
    ExactProduct,
    Empirical,
    EvtApprox,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::LinkSeries => "lemma1_series",
            Provenance::LinkQuadrature => "lemma1_quadrature",
            Provenance::ExactProduct => "exact_product",
            Provenance::Empirical => "empirical",
            Provenance::EvtApprox => "evt_approx",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkCdfMethod {
    ClosedForm,
    Series,
    Quadrature,
}

/// One per-link CDF evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkCdfEval {
    pub value: f64,
    /// `1 − value`, carried separately so tiny survival probabilities keep their digits.
    pub survival: f64,
    pub method: LinkCdfMethod,
    pub terms: u32,
}

fn check_link_args(function: &'static str, theta: f64, nu: f64, gamma: f64) -> Result<()> {
    if !(theta > 0.0 && theta.is_finite()) {
        return Err(Error::domain(
            function,
            format!("theta must be positive, got {theta}"),
        ));
    }
    if nu.is_nan() || nu < 0.0 {
        return Err(Error::domain(
            function,
            format!("nu must be nonnegative, got {nu}"),
        ));
    }
    if gamma.is_nan() || gamma < 0.0 {
        return Err(Error::domain(
            function,
            format!("gamma must be nonnegative, got {gamma}"),
        ));
    }
    Ok(())
}

fn closed(survival: f64) -> LinkCdfEval {
    LinkCdfEval {
        value: 1.0 - survival,
        survival,
        method: LinkCdfMethod::ClosedForm,
        terms: 0,
    }
}

/// Degenerate inputs with an exact answer.
fn degenerate(theta: f64, nu: f64, gamma: f64) -> Option<LinkCdfEval> {
    if gamma == 0.0 {
        return Some(closed(1.0));
    }
    if gamma.is_infinite() {
        return Some(closed(0.0));
    }
    if nu == 0.0 {
        return Some(closed((-theta * gamma).exp()));
    }
    if nu.is_infinite() {
        return Some(closed(0.0));
    }
    None
}

/// Per-link CDF `F(γ)` from the exponential-integral series.
///
/// The series is truncated once the alternating tail is below `tol`. Inputs where the
/// series would lose more than `tol` to cancellation are evaluated by
/// [`link_cdf_quadrature`] instead; the returned `method` says which route was taken.
pub fn link_cdf_series(theta: f64, nu: f64, gamma: f64, tol: f64) -> Result<LinkCdfEval> {
    check_link_args("link_cdf_series", theta, nu, gamma)?;
    if let Some(done) = degenerate(theta, nu, gamma) {
        return Ok(done);
    }
    let x = theta * gamma;
    // x Σ|t_k| ≤ e^{ν − x}; rounding is a few ulps of that
    let cancellation = 8.0 * f64::EPSILON * (nu - x).exp();
    if cancellation > 0.5 * tol {
        return link_cdf_quadrature(theta, nu, gamma);
    }
    let max_order = series_order(nu);
    let e = exp_integral_sequence(x, max_order)?;
    let mut acc = Neumaier::default();
    let mut coeff = 1.0;
    for k in 0..=max_order as usize {
        if k > 0 {
            coeff *= -nu / k as f64;
        }
        let term = x * coeff * e[k];
        acc.add(term);
        if k as f64 > nu {
            let next =
                x * coeff.abs() * nu / (k + 1) as f64 * e.get(k + 1).copied().unwrap_or(e[k]);
            if next < tol {
                let survival = acc.value().clamp(0.0, 1.0);
                return Ok(LinkCdfEval {
                    value: 1.0 - survival,
                    survival,
                    method: LinkCdfMethod::Series,
                    terms: k as u32 + 1,
                });
            }
        }
    }
    Err(Error::Convergence {
        what: "link_cdf_series",
        iterations: max_order as usize + 1,
    })
}

fn series_order(nu: f64) -> u32 {
    let wanted = nu + 12.0 * nu.sqrt() + 40.0;
    (wanted.ceil() as u32).min(MAX_SERIES_TERMS - 1)
}

/// Per-link CDF from the integral form, by adaptive quadrature (absolute error ≤ 1e-11).
pub fn link_cdf_quadrature(theta: f64, nu: f64, gamma: f64) -> Result<LinkCdfEval> {
    check_link_args("link_cdf_quadrature", theta, nu, gamma)?;
    if let Some(done) = degenerate(theta, nu, gamma) {
        return Ok(LinkCdfEval {
            method: LinkCdfMethod::Quadrature,
            ..done
        });
    }
    let x = theta * gamma;
    if x > 745.0 {
        return Ok(LinkCdfEval {
            method: LinkCdfMethod::Quadrature,
            ..closed(0.0)
        });
    }
    let integrand = |t: f64| (-x - t - nu * x / (x + t)).exp();
    let opts = QuadOptions {
        abs_tol: 1e-13,
        rel_tol: 1e-12,
        max_subdivisions: 2000,
    };
    let r = adaptive_quad_with(integrand, 0.0, f64::INFINITY, &opts)?;
    let survival = r.value.clamp(0.0, 1.0);
    Ok(LinkCdfEval {
        value: 1.0 - survival,
        survival,
        method: LinkCdfMethod::Quadrature,
        terms: 0,
    })
}

/// `F(γ)` of one link using the default series tolerance.
pub fn link_cdf(link: &LinkParams, gamma: f64) -> Result<f64> {
    link_cdf_series(link.theta, link.nu, gamma, SERIES_TOL).map(|e| e.value)
}

/// Exact CDF of the best relay, `Π_ℓ F_ℓ(γ)`, accumulated as `Σ_ℓ ln F_ℓ(γ)`.
pub fn exact_max_cdf(links: &[LinkParams], gamma: f64) -> Result<f64> {
    exact_max_log_cdf(links, gamma).map(f64::exp)
}

/// `ln Π_ℓ F_ℓ(γ)`; `-∞` where some link has `F_ℓ(γ) = 0`.
pub fn exact_max_log_cdf(links: &[LinkParams], gamma: f64) -> Result<f64> {
    if links.is_empty() {
        return Err(Error::domain("exact_max_cdf", "no links"));
    }
    let mut acc = Neumaier::default();
    for link in links {
        let eval = link_cdf_series(link.theta, link.nu, gamma, SERIES_TOL)?;
        if eval.value <= 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        acc.add((-eval.survival).ln_1p());
    }
    Ok(acc.value())
}

/// A CDF tabulated on an increasing grid of linear SNR values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CdfCurve {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub provenance: Provenance,
}

impl CdfCurve {
    pub fn new(grid: Vec<f64>, values: Vec<f64>, provenance: Provenance) -> Result<Self> {
        if grid.len() != values.len() || grid.is_empty() {
            return Err(Error::domain(
                "CdfCurve::new",
                format!("{} grid points for {} values", grid.len(), values.len()),
            ));
        }
        if grid.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::domain(
                "CdfCurve::new",
                "grid must be strictly increasing",
            ));
        }
        if values.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::domain("CdfCurve::new", "values must lie in [0, 1]"));
        }
        Ok(Self {
            grid,
            values,
            provenance,
        })
    }

    /// Tabulates `cdf` on `grid` in parallel.
    pub fn from_fn<F>(grid: &[f64], provenance: Provenance, cdf: F) -> Result<Self>
    where
        F: Fn(f64) -> Result<f64> + Sync,
    {
        let values = grid
            .par_iter()
            .map(|&g| cdf(g).map(|v| v.clamp(0.0, 1.0)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(grid.to_vec(), values, provenance)
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// Linear interpolation, flat beyond the ends.
    pub fn eval(&self, gamma: f64) -> f64 {
        let n = self.grid.len();
        if gamma <= self.grid[0] {
            return self.values[0];
        }
        if gamma >= self.grid[n - 1] {
            return self.values[n - 1];
        }
        let i = self.grid.partition_point(|&g| g <= gamma);
        let (g0, g1) = (self.grid[i - 1], self.grid[i]);
        let (v0, v1) = (self.values[i - 1], self.values[i]);
        v0 + (v1 - v0) * (gamma - g0) / (g1 - g0)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["gamma", "value", "provenance"])?;
        for (g, v) in self.grid.iter().zip(&self.values) {
            w.write_record([
                g.to_string(),
                v.to_string(),
                self.provenance.as_str().to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Sorted sample set with O(log n) CDF queries.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf {
    sorted: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn new(samples: &[f64]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::domain("empirical_cdf", "no samples"));
        }
        if samples.iter().any(|s| s.is_nan()) {
            return Err(Error::domain("empirical_cdf", "NaN sample"));
        }
        let mut sorted = samples.to_vec();
        sorted.par_sort_unstable_by(f64::total_cmp);
        Ok(Self { sorted })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    /// Right-continuous `#{x_i ≤ γ} / n`.
    pub fn eval(&self, gamma: f64) -> f64 {
        self.sorted.partition_point(|&x| x <= gamma) as f64 / self.sorted.len() as f64
    }

    /// Empirical quantile (lower order statistic).
    pub fn quantile(&self, p: f64) -> f64 {
        let n = self.sorted.len();
        let idx = ((p.clamp(0.0, 1.0) * n as f64).ceil() as usize).clamp(1, n) - 1;
        self.sorted[idx]
    }

    pub fn curve(&self, grid: &[f64]) -> Result<CdfCurve> {
        let values = grid.iter().map(|&g| self.eval(g)).collect();
        CdfCurve::new(grid.to_vec(), values, Provenance::Empirical)
    }

    /// Exact one-sample Kolmogorov–Smirnov statistic `sup_γ |F_n(γ) − F(γ)|` for a
    /// continuous `cdf`, evaluated at every sample (in parallel).
    pub fn ks_statistic<F>(&self, cdf: F) -> Result<f64>
    where
        F: Fn(f64) -> Result<f64> + Sync,
    {
        let n = self.sorted.len() as f64;
        self.sorted
            .par_iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = cdf(x)?;
                Ok((f - i as f64 / n).max((i + 1) as f64 / n - f))
            })
            .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
    }
}

/// Empirical CDF of `samples` tabulated on `grid`.
pub fn empirical_cdf(samples: &[f64], grid: &[f64]) -> Result<CdfCurve> {
    EmpiricalCdf::new(samples)?.curve(grid)
}

/// `n` geometrically spaced points from `lo` to `hi` inclusive.
pub fn geometric_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo && hi.is_finite()) || n < 2 {
        return Err(Error::domain(
            "geometric_grid",
            format!("need 0 < lo < hi and n >= 2, got lo = {lo}, hi = {hi}, n = {n}"),
        ));
    }
    let ratio = (hi / lo).ln() / (n - 1) as f64;
    let mut grid: Vec<f64> = (0..n).map(|i| lo * (ratio * i as f64).exp()).collect();
    grid[n - 1] = hi;
    Ok(grid)
}

/// Geometric grid spanning the 0.1% to 99.9% sample quantiles.
pub fn quantile_grid(samples: &EmpiricalCdf, n: usize) -> Result<Vec<f64>> {
    let hi = samples.quantile(0.999);
    let mut lo = samples.quantile(0.001);
    if lo <= 0.0 {
        lo = samples
            .sorted()
            .iter()
            .copied()
            .find(|&x| x > 0.0)
            .unwrap_or(hi * 1e-6)
            .min(hi * 1e-3);
    }
    geometric_grid(lo, hi, n)
}

/// `sup |a − b|` over the union of both grids, interpolating where a grid lacks a point.
/// Symmetric, and 0 exactly when the curves agree on every grid point.
pub fn ks_distance(a: &CdfCurve, b: &CdfCurve) -> f64 {
    if a.grid == b.grid {
        return a
            .values
            .iter()
            .zip(&b.values)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
    }
    a.grid
        .iter()
        .chain(&b.grid)
        .map(|&g| (a.eval(g) - b.eval(g)).abs())
        .fold(0.0, f64::max)
}

/// Replaces every `θ_ℓ` by the arithmetic mean of all `θ_ℓ`, keeping each `ν_ℓ`.
pub fn mean_theta_iid_baseline(links: &[LinkParams]) -> Vec<LinkParams> {
    if links.is_empty() {
        return Vec::new();
    }
    if links.iter().all(|l| l.theta == links[0].theta) {
        return links.to_vec();
    }
    let mean = crate::compensated::sum(links.iter().map(|l| l.theta)) / links.len() as f64;
    links
        .iter()
        .map(|l| LinkParams { theta: mean, ..*l })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    // 50-digit evaluations of the integral form
    const GOLDEN: [(f64, f64, f64, f64); 3] = [
        (1.0, 0.2, 1.0, 0.673_168_136_747_115_362_258_735_3),
        (0.5, 3.0, 4.0, 0.981_939_047_681_710_858_902_493_3),
        (2.0, 0.7, 0.3, 0.607_219_190_817_794_282_809_952),
    ];

    #[test]
    fn golden_values_both_forms() {
        for (theta, nu, gamma, f) in GOLDEN {
            let s = link_cdf_series(theta, nu, gamma, SERIES_TOL).unwrap();
            let q = link_cdf_quadrature(theta, nu, gamma).unwrap();
            assert_eq!(s.method, LinkCdfMethod::Series);
            assert!((s.value - f).abs() < 1e-12, "{} vs {f}", s.value);
            assert!((q.value - f).abs() < 1e-11, "{} vs {f}", q.value);
        }
    }

    #[test]
    fn zero_gamma_and_zero_nu() {
        assert_eq!(
            link_cdf_series(2.0, 1.0, 0.0, SERIES_TOL).unwrap().value,
            0.0
        );
        assert_eq!(link_cdf_quadrature(2.0, 1.0, 0.0).unwrap().value, 0.0);
        for (theta, gamma) in [(0.3f64, 2.0f64), (5.0, 0.01), (1.0, 7.0)] {
            let exact = 1.0 - (-theta * gamma).exp();
            let s = link_cdf_series(theta, 0.0, gamma, SERIES_TOL)
                .unwrap()
                .value;
            assert!((s - exact).abs() < 1e-15);
        }
    }

    #[test]
    fn large_nu_routes_to_quadrature() {
        let e = link_cdf_series(1.0, 40.0, 0.5, SERIES_TOL).unwrap();
        assert_eq!(e.method, LinkCdfMethod::Quadrature);
        let e = link_cdf_series(1.0, 40.0, 80.0, SERIES_TOL).unwrap();
        assert_eq!(e.method, LinkCdfMethod::Series);
        let q = link_cdf_quadrature(1.0, 40.0, 80.0).unwrap();
        assert!((e.value - q.value).abs() < 1e-11);
    }

    #[test]
    fn negative_inputs_are_domain_errors() {
        assert!(link_cdf_series(-1.0, 1.0, 1.0, SERIES_TOL).is_err());
        assert!(link_cdf_series(1.0, -1.0, 1.0, SERIES_TOL).is_err());
        assert!(link_cdf_series(1.0, 1.0, -1.0, SERIES_TOL).is_err());
    }

    #[test]
    fn single_link_product_is_the_link_cdf() {
        let link = LinkParams::new(0.8, 0.6);
        for g in [0.1, 1.0, 3.0] {
            let a = exact_max_cdf(&[link], g).unwrap();
            let b = link_cdf(&link, g).unwrap();
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn product_is_below_every_factor() {
        let links = [
            LinkParams::new(0.5, 0.1),
            LinkParams::new(2.0, 1.5),
            LinkParams::new(1.0, 0.3),
        ];
        for g in [0.2, 1.0, 4.0] {
            let p = exact_max_cdf(&links, g).unwrap();
            let m = links
                .iter()
                .map(|l| link_cdf(l, g).unwrap())
                .fold(1.0, f64::min);
            assert!(p <= m + 1e-15);
        }
    }

    #[test]
    fn empirical_single_sample_is_a_step() {
        let e = EmpiricalCdf::new(&[2.0]).unwrap();
        assert_eq!(e.eval(1.999), 0.0);
        assert_eq!(e.eval(2.0), 1.0);
        assert_eq!(e.eval(5.0), 1.0);
    }

    #[test]
    fn ks_distance_basics() {
        let grid = vec![1.0, 2.0, 3.0];
        let zero = CdfCurve::new(grid.clone(), vec![0.0; 3], Provenance::Empirical).unwrap();
        let one = CdfCurve::new(grid.clone(), vec![1.0; 3], Provenance::Empirical).unwrap();
        assert_eq!(ks_distance(&zero, &zero), 0.0);
        assert_eq!(ks_distance(&zero, &one), 1.0);
        assert_eq!(ks_distance(&one, &zero), 1.0);
    }

    #[test]
    fn curve_rejects_bad_grids() {
        assert!(CdfCurve::new(vec![1.0, 1.0], vec![0.1, 0.2], Provenance::Empirical).is_err());
        assert!(CdfCurve::new(vec![1.0, 2.0], vec![0.1, 1.2], Provenance::Empirical).is_err());
    }

    #[test]
    fn csv_export_has_expected_columns() {
        let c = CdfCurve::new(vec![1.0, 2.0], vec![0.25, 0.5], Provenance::ExactProduct).unwrap();
        let mut buf = Vec::new();
        c.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "gamma,value,provenance\n1,0.25,exact_product\n2,0.5,exact_product\n"
        );
    }

    #[test]
    fn mean_theta_baseline() {
        let same = vec![LinkParams::new(2.0, 0.1), LinkParams::new(2.0, 0.4)];
        assert_eq!(mean_theta_iid_baseline(&same), same);
        let half: Vec<_> = (0..8)
            .map(|i| LinkParams::new(if i < 4 { 1.0 } else { 3.0 }, 0.2))
            .collect();
        assert!(mean_theta_iid_baseline(&half)
            .iter()
            .all(|l| l.theta == 2.0 && l.nu == 0.2));
    }

    #[test]
    fn geometric_grid_endpoints() {
        let g = geometric_grid(0.01, 100.0, 5).unwrap();
        assert_eq!(g[0], 0.01);
        assert_eq!(g[4], 100.0);
        assert!((g[2] - 1.0).abs() < 1e-12);
        assert!(geometric_grid(0.0, 1.0, 5).is_err());
    }
}
