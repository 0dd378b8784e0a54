//! Choice of the time-switching factor `α` and power-splitting factor `λ`.
//!
//! A larger `α` always makes the best relay stochastically larger, so outage and ergodic
//! searches fix `α = α_max` and only search `λ`. Outage minimization maximizes
//! `g(λ) = u(γ_th) = Σ_ℓ exp(−θ_ℓ(λ) γ_th − ν_ℓ(λ))` (outage is `exp(−g)`) with a guarded
//! ascent on the analytic derivative
//!
//! ```text
//! dθ/dλ = θ / (1 − λ)        dν/dλ = −ν (1 + α) / ((1 − λ)(2α + λ(1 − α)))
//! ```
//!
//! Throughput has no such ordering in `α` and is swept over a 2-D grid.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evt::u_of_gamma;
use crate::metrics::ergodic_capacity;
use crate::ordering::{predict_order, Direction, Parameter, Regime, LOW_SNR_PIVOT_DB};
use crate::scenario::{build_links, ScenarioConfig};

pub const GRAD_TOL: f64 = 1e-10;
pub const WIDTH_TOL: f64 = 1e-8;
pub const DEFAULT_ALPHA_MAX: f64 = 0.9;
pub const DEFAULT_LAMBDA_MAX: f64 = 0.9;
const MAX_EVALUATIONS: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveKind {
    /// `ln P_out`, minimized.
    OutageLog,
    ErgodicCapacity,
    Throughput,
}

impl ObjectiveKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ObjectiveKind::OutageLog => "outage_log",
            ObjectiveKind::ErgodicCapacity => "ergodic_capacity",
            ObjectiveKind::Throughput => "throughput",
        }
    }
}

/// One objective evaluation. `value` is the best objective seen so far, so a trace is
/// monotone in the direction of optimization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub alpha: f64,
    pub lambda: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationResult {
    pub alpha_star: f64,
    pub lambda_star: f64,
    pub objective_value: f64,
    pub objective_kind: ObjectiveKind,
    pub trace: Vec<TracePoint>,
    pub converged: bool,
    pub evaluations: usize,
    /// Why a sweep stopped early, if it did.
    pub failure: Option<String>,
}

impl OptimizationResult {
    /// Outage probability at the optimum (outage searches only).
    pub fn outage_probability(&self) -> Option<f64> {
        (self.objective_kind == ObjectiveKind::OutageLog).then(|| self.objective_value.exp())
    }

    /// CSV with columns `objective_kind,alpha_star,lambda_star,value,evaluations,converged`.
    pub fn write_csv<W: Write>(results: &[OptimizationResult], writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record([
            "objective_kind",
            "alpha_star",
            "lambda_star",
            "value",
            "evaluations",
            "converged",
        ])?;
        for r in results {
            w.write_record([
                r.objective_kind.as_str().to_string(),
                r.alpha_star.to_string(),
                r.lambda_star.to_string(),
                r.objective_value.to_string(),
                r.evaluations.to_string(),
                r.converged.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Where the outage search starts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WarmStart {
    /// `λ₀ = 0` when the ordering predicts smaller `λ` is better (low SNR), else `0.5`.
    Predicted,
    At(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutageOptions {
    pub alpha_max: f64,
    pub lambda_max: f64,
    pub warm_start: WarmStart,
    /// Source SNR (dB) below which the low-SNR regime is assumed.
    pub pivot_db: f64,
}

impl Default for OutageOptions {
    fn default() -> Self {
        Self {
            alpha_max: DEFAULT_ALPHA_MAX,
            lambda_max: DEFAULT_LAMBDA_MAX,
            warm_start: WarmStart::Predicted,
            pivot_db: LOW_SNR_PIVOT_DB,
        }
    }
}

fn check_bounds(alpha_max: f64, lambda_max: f64) -> Result<()> {
    if !(0.0..1.0).contains(&alpha_max) {
        return Err(Error::config(
            "invalid_bounds",
            format!("alpha_max = {alpha_max} must lie in [0, 1)"),
        ));
    }
    if !(0.0..1.0).contains(&lambda_max) {
        return Err(Error::config(
            "invalid_bounds",
            format!("lambda_max = {lambda_max} must lie in [0, 1)"),
        ));
    }
    Ok(())
}

/// `g(λ) = u(γ_th)` and `dg/dλ` for the links of `config` at `(α, λ)`.
pub fn outage_objective(
    config: &ScenarioConfig,
    alpha: f64,
    lambda: f64,
    gamma_th: f64,
) -> Result<(f64, f64)> {
    let links = build_links(&config.with_factors(alpha, lambda))?;
    let g = u_of_gamma(&links, gamma_th);
    let den = 2.0 * alpha + lambda * (1.0 - alpha);
    let mut slope = crate::compensated::Neumaier::default();
    for l in &links {
        let term = (-l.theta * gamma_th - l.nu).exp();
        if term == 0.0 {
            continue;
        }
        let dtheta = l.theta / (1.0 - lambda);
        let dnu = -l.nu * (1.0 + alpha) / ((1.0 - lambda) * den);
        slope.add(-term * (gamma_th * dtheta + dnu));
    }
    Ok((g, slope.value()))
}

struct Recorder<F> {
    objective: F,
    alpha: f64,
    evaluations: usize,
    trace: Vec<TracePoint>,
    best: Option<(f64, f64)>,
}

impl<F: FnMut(f64) -> Result<(f64, f64)>> Recorder<F> {
    fn eval(&mut self, lambda: f64) -> Result<(f64, f64)> {
        if self.evaluations >= MAX_EVALUATIONS {
            return Err(Error::Convergence {
                what: "outage ascent",
                iterations: self.evaluations,
            });
        }
        let (g, dg) = (self.objective)(lambda)?;
        self.evaluations += 1;
        // strict improvement keeps the earliest (warm-start side) point on ties
        if self.best.is_none_or(|(_, b)| g > b) {
            self.best = Some((lambda, g));
        }
        let best = self.best.expect("just set").1;
        self.trace.push(TracePoint {
            alpha: self.alpha,
            lambda,
            value: -best,
        });
        Ok((g, dg))
    }
}

struct AscentEnd {
    x: f64,
    grad: f64,
    converged: bool,
}

/// Guarded ascent of a smooth scalar function on `[lo, hi]` from `x0`.
///
/// Expands steps along the gradient until its sign flips (or a bound stops it), then
/// refines the bracket with secant steps on the derivative, falling back to bisection
/// whenever the secant does not halve the bracket.
fn ascend<F>(rec: &mut Recorder<F>, lo: f64, hi: f64, x0: f64) -> Result<AscentEnd>
where
    F: FnMut(f64) -> Result<(f64, f64)>,
{
    let mut x = x0.clamp(lo, hi);
    let (_, mut dx) = rec.eval(x)?;
    let stop = |x: f64, grad: f64| AscentEnd {
        x,
        grad,
        converged: true,
    };
    if dx.abs() <= GRAD_TOL
        || (x <= lo && dx < 0.0)
        || (x >= hi && dx > 0.0)
        || hi - lo <= WIDTH_TOL
    {
        return Ok(stop(x, dx));
    }

    let s = dx.signum();
    let mut h = 0.05 * (hi - lo);
    let (mut a, mut da, mut b, mut db);
    loop {
        let xn = (x + s * h).clamp(lo, hi);
        let (_, dn) = rec.eval(xn)?;
        if dn.abs() <= GRAD_TOL {
            return Ok(stop(xn, dn));
        }
        if dn * s > 0.0 {
            x = xn;
            dx = dn;
            if xn <= lo || xn >= hi {
                return Ok(stop(xn, dn));
            }
            h *= 2.0;
            continue;
        }
        if s > 0.0 {
            (a, da, b, db) = (x, dx, xn, dn);
        } else {
            (a, da, b, db) = (xn, dn, x, dx);
        }
        break;
    }

    let mut last_width = b - a;
    let mut halve_next = false;
    while b - a > WIDTH_TOL {
        let width = b - a;
        let secant = a - da * width / (db - da);
        let m = if halve_next || !(secant > a && secant < b) {
            0.5 * (a + b)
        } else {
            secant
        };
        let (_, dm) = rec.eval(m)?;
        if dm.abs() <= GRAD_TOL {
            return Ok(stop(m, dm));
        }
        if dm > 0.0 {
            a = m;
            da = dm;
        } else {
            b = m;
            db = dm;
        }
        halve_next = b - a > 0.5 * last_width;
        last_width = width;
    }
    let (xe, ge) = if da.abs() < db.abs() {
        (a, da)
    } else {
        (b, db)
    };
    Ok(stop(xe, ge))
}

/// Minimizes outage at `α = α_max` over `λ ∈ [0, λ_max]`.
pub fn minimize_outage(
    config_template: &ScenarioConfig,
    gamma_th: f64,
    alpha_max: f64,
    lambda_max: f64,
) -> Result<OptimizationResult> {
    minimize_outage_with(
        config_template,
        gamma_th,
        &OutageOptions {
            alpha_max,
            lambda_max,
            ..OutageOptions::default()
        },
    )
}

pub fn minimize_outage_with(
    config_template: &ScenarioConfig,
    gamma_th: f64,
    options: &OutageOptions,
) -> Result<OptimizationResult> {
    check_bounds(options.alpha_max, options.lambda_max)?;
    if !(gamma_th > 0.0) {
        return Err(Error::config(
            "invalid_threshold",
            format!("gamma_th = {gamma_th} must be positive"),
        ));
    }
    let lambda0 = match options.warm_start {
        WarmStart::At(l) => l,
        WarmStart::Predicted => {
            let regime = if config_template.source_snr_db() < options.pivot_db {
                Regime::Low
            } else {
                Regime::Mid
            };
            match predict_order(Parameter::PsFactor, options.lambda_max, 0.0, regime) {
                Direction::StLarger => 0.0,
                _ => 0.5_f64.min(options.lambda_max),
            }
        }
    };
    line_search_outage(
        config_template,
        gamma_th,
        options.alpha_max,
        options.lambda_max,
        lambda0,
    )
}

fn line_search_outage(
    config: &ScenarioConfig,
    gamma_th: f64,
    alpha: f64,
    lambda_max: f64,
    lambda0: f64,
) -> Result<OptimizationResult> {
    let mut rec = Recorder {
        objective: |l: f64| outage_objective(config, alpha, l, gamma_th),
        alpha,
        evaluations: 0,
        trace: Vec::new(),
        best: None,
    };
    let end = ascend(&mut rec, 0.0, lambda_max, lambda0)?;
    let mut converged = end.converged;
    let on_bound = end.x <= 0.0 || end.x >= lambda_max;
    let outward = (end.x <= 0.0 && end.grad < 0.0) || (end.x >= lambda_max && end.grad > 0.0);
    if on_bound && !outward {
        for start in [0.0, 0.5_f64.min(lambda_max), lambda_max] {
            converged &= ascend(&mut rec, 0.0, lambda_max, start)?.converged;
        }
    }
    let (lambda_star, g) = rec.best.expect("at least one evaluation");
    Ok(OptimizationResult {
        alpha_star: alpha,
        lambda_star,
        objective_value: -g,
        objective_kind: ObjectiveKind::OutageLog,
        trace: rec.trace,
        converged,
        evaluations: rec.evaluations,
        failure: None,
    })
}

/// Exhaustive sweep; `candidates` must be sorted so that ties resolve toward the first.
fn sweep<F>(kind: ObjectiveKind, candidates: &[(f64, f64)], eval: F) -> OptimizationResult
where
    F: Fn(f64, f64) -> Result<f64> + Sync,
{
    let values: Vec<Result<f64>> = candidates
        .par_iter()
        .map(|&(alpha, lambda)| eval(alpha, lambda))
        .collect();
    let mut best: Option<(f64, f64, f64)> = None;
    let mut trace = Vec::with_capacity(candidates.len());
    let mut failure = None;
    for (&(alpha, lambda), v) in candidates.iter().zip(values) {
        match v {
            Ok(v) => {
                if best.is_none_or(|(_, _, b)| v > b) {
                    best = Some((alpha, lambda, v));
                }
                trace.push(TracePoint {
                    alpha,
                    lambda,
                    value: best.expect("just set").2,
                });
            }
            Err(e) => {
                failure = Some(e.to_string());
                break;
            }
        }
    }
    let (alpha_star, lambda_star, objective_value) = best.unwrap_or((f64::NAN, f64::NAN, f64::NAN));
    OptimizationResult {
        alpha_star,
        lambda_star,
        objective_value,
        objective_kind: kind,
        evaluations: trace.len() + usize::from(failure.is_some()),
        trace,
        converged: failure.is_none(),
        failure,
    }
}

fn sorted_grid(values: &[f64], name: &'static str, upper: f64) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::config("empty_grid", format!("{name} grid is empty")));
    }
    if values.iter().any(|v| !(*v >= 0.0 && *v <= upper)) {
        return Err(Error::config(
            "invalid_bounds",
            format!("{name} grid leaves [0, {upper}]"),
        ));
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v.dedup();
    Ok(v)
}

/// Ergodic capacity at `α = α_max`, maximized over the finite set `lambdas`.
/// Ties go to the smaller `λ`. A failing candidate stops the sweep; the partial trace is
/// kept and `failure` says why.
pub fn maximize_ergodic(
    config_template: &ScenarioConfig,
    alpha_max: f64,
    lambdas: &[f64],
) -> Result<OptimizationResult> {
    check_bounds(alpha_max, 0.0)?;
    let lambdas = sorted_grid(lambdas, "lambda", 1.0 - f64::EPSILON)?;
    let candidates: Vec<(f64, f64)> = lambdas.iter().map(|&l| (alpha_max, l)).collect();
    Ok(sweep(
        ObjectiveKind::ErgodicCapacity,
        &candidates,
        |a, l| ergodic_capacity(&build_links(&config_template.with_factors(a, l))?),
    ))
}

/// Throughput `(1 − α) C` over the grid `alphas × lambdas`; ties go to the smaller `α`,
/// then the smaller `λ`.
pub fn maximize_throughput(
    config_template: &ScenarioConfig,
    alphas: &[f64],
    lambdas: &[f64],
) -> Result<OptimizationResult> {
    let alphas = sorted_grid(alphas, "alpha", 1.0 - f64::EPSILON)?;
    let lambdas = sorted_grid(lambdas, "lambda", 1.0 - f64::EPSILON)?;
    let candidates: Vec<(f64, f64)> = alphas
        .iter()
        .flat_map(|&a| lambdas.iter().map(move |&l| (a, l)))
        .collect();
    Ok(sweep(ObjectiveKind::Throughput, &candidates, |a, l| {
        let c = ergodic_capacity(&build_links(&config_template.with_factors(a, l))?)?;
        Ok((1.0 - a) * c)
    }))
}

/// `0, step, 2 step, …` up to and including `max` (within rounding).
pub fn step_grid(max: f64, step: f64) -> Vec<f64> {
    let n = (max / step + 1e-9).floor() as usize;
    (0..=n)
        .map(|i| (i as f64 * step * 1e12).round() / 1e12)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Protocol {
    TsOnly,
    PsOnly,
    Hybrid,
}

impl Protocol {
    pub fn as_str(self) -> &'static str {
        match self {
            Protocol::TsOnly => "ts_only",
            Protocol::PsOnly => "ps_only",
            Protocol::Hybrid => "hybrid",
        }
    }
}

/// One protocol at one source power.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProtocolRow {
    pub gamma_s_dbm: f64,
    pub protocol: Protocol,
    pub alpha: f64,
    pub lambda: f64,
    pub outage_probability: f64,
    /// Best ergodic capacity over the protocol's feasible points on the factor grid.
    pub ergodic_capacity: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProtocolOptions {
    pub gamma_th: f64,
    pub alpha_max: f64,
    pub lambda_max: f64,
    /// Spacing of the factor grid used for the capacity columns.
    pub grid_step: f64,
}

impl Default for ProtocolOptions {
    fn default() -> Self {
        Self {
            gamma_th: crate::scenario::db_to_linear(15.0),
            alpha_max: DEFAULT_ALPHA_MAX,
            lambda_max: DEFAULT_LAMBDA_MAX,
            grid_step: 0.1,
        }
    }
}

/// Time switching only (`λ = 0`), power splitting only (`α = 0`) and the hybrid scheme,
/// each optimized for outage, at every source power in `sweep_dbm`.
///
/// The hybrid region contains both single-mechanism regions, so the hybrid search also
/// considers their optima as candidate points.
pub fn protocol_comparison(
    config_template: &ScenarioConfig,
    sweep_dbm: &[f64],
    options: &ProtocolOptions,
) -> Result<Vec<ProtocolRow>> {
    check_bounds(options.alpha_max, options.lambda_max)?;
    let alphas = step_grid(options.alpha_max, options.grid_step);
    let lambdas = step_grid(options.lambda_max, options.grid_step);
    let mut rows = Vec::with_capacity(3 * sweep_dbm.len());
    for &gamma_s in sweep_dbm {
        let config = config_template.with_source_snr_dbm(gamma_s);
        let gamma_th = options.gamma_th;

        let (g_ts, _) = outage_objective(&config, options.alpha_max, 0.0, gamma_th)?;
        let ts = (options.alpha_max, 0.0, g_ts);
        let ps_run = line_search_outage(&config, gamma_th, 0.0, options.lambda_max, 0.0)?;
        let ps = (0.0, ps_run.lambda_star, -ps_run.objective_value);
        let hy_run = minimize_outage(&config, gamma_th, options.alpha_max, options.lambda_max)?;
        let mut hybrid = (
            hy_run.alpha_star,
            hy_run.lambda_star,
            -hy_run.objective_value,
        );
        for cand in [ts, ps] {
            if cand.2 > hybrid.2 {
                hybrid = cand;
            }
        }

        let ts_cap = maximize_throughput_like(&config, &alphas, &[0.0])?;
        let ps_cap = maximize_throughput_like(&config, &[0.0], &lambdas)?;
        let hy_cap = maximize_throughput_like(&config, &alphas, &lambdas)?;

        for (protocol, (alpha, lambda, g), cap) in [
            (Protocol::TsOnly, ts, ts_cap),
            (Protocol::PsOnly, ps, ps_cap),
            (Protocol::Hybrid, hybrid, hy_cap),
        ] {
            rows.push(ProtocolRow {
                gamma_s_dbm: gamma_s,
                protocol,
                alpha,
                lambda,
                outage_probability: (-g).exp(),
                ergodic_capacity: cap,
            });
        }
    }
    Ok(rows)
}

fn maximize_throughput_like(
    config: &ScenarioConfig,
    alphas: &[f64],
    lambdas: &[f64],
) -> Result<f64> {
    let candidates: Vec<(f64, f64)> = alphas
        .iter()
        .flat_map(|&a| lambdas.iter().map(move |&l| (a, l)))
        .collect();
    let r = sweep(ObjectiveKind::ErgodicCapacity, &candidates, |a, l| {
        ergodic_capacity(&build_links(&config.with_factors(a, l))?)
    });
    match r.failure {
        Some(msg) => Err(Error::domain("protocol_comparison", msg)),
        None => Ok(r.objective_value),
    }
}

pub fn write_protocol_csv<W: Write>(rows: &[ProtocolRow], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::outage_probability;
    use crate::scenario::db_to_linear;

    fn ring(snr_dbm: f64) -> ScenarioConfig {
        let d2 = (0..10).map(|i| 0.5 + 0.2 * i as f64 / 9.0).collect();
        ScenarioConfig::with_distances(vec![0.65; 10], d2).with_source_snr_dbm(snr_dbm)
    }

    #[test]
    fn objective_matches_outage_metric() {
        let cfg = ring(20.0);
        let gth = db_to_linear(15.0);
        for lambda in [0.0, 0.3, 0.8] {
            let (g, _) = outage_objective(&cfg, 0.9, lambda, gth).unwrap();
            let links = build_links(&cfg.with_factors(0.9, lambda)).unwrap();
            let p = outage_probability(&links, gth).unwrap();
            assert!(((-g).exp() - p).abs() < 1e-12);
        }
    }

    #[test]
    fn analytic_slope_matches_finite_difference() {
        let cfg = ring(30.0);
        let gth = db_to_linear(15.0);
        for (alpha, lambda) in [(0.9, 0.3), (0.2, 0.6), (0.0, 0.4)] {
            let h = 1e-6;
            let (gp, _) = outage_objective(&cfg, alpha, lambda + h, gth).unwrap();
            let (gm, _) = outage_objective(&cfg, alpha, lambda - h, gth).unwrap();
            let (_, dg) = outage_objective(&cfg, alpha, lambda, gth).unwrap();
            let fd = (gp - gm) / (2.0 * h);
            assert!((fd - dg).abs() <= 1e-6 * dg.abs().max(1e-3), "{fd} vs {dg}");
        }
    }

    #[test]
    fn alpha_star_is_alpha_max() {
        let r = minimize_outage(&ring(25.0), db_to_linear(15.0), 0.7, 0.9).unwrap();
        assert_eq!(r.alpha_star, 0.7);
        assert!(r.lambda_star >= 0.0 && r.lambda_star <= 0.9);
        assert_eq!(r.outage_probability(), Some(r.objective_value.exp()));
    }

    #[test]
    fn trace_is_monotone() {
        let r = minimize_outage_with(
            &ring(40.0),
            db_to_linear(15.0),
            &OutageOptions {
                warm_start: WarmStart::At(0.0),
                ..OutageOptions::default()
            },
        )
        .unwrap();
        assert!(r.trace.windows(2).all(|w| w[1].value <= w[0].value));
        assert_eq!(r.trace.len(), r.evaluations);
    }

    #[test]
    fn invalid_bounds_are_rejected() {
        assert!(minimize_outage(&ring(10.0), 1.0, 1.0, 0.5).is_err());
        assert!(minimize_outage(&ring(10.0), 1.0, 0.5, 1.0).is_err());
        assert!(minimize_outage(&ring(10.0), 0.0, 0.5, 0.5).is_err());
    }

    #[test]
    fn single_candidate_sweeps() {
        let r = maximize_ergodic(&ring(25.0), 0.9, &[0.3]).unwrap();
        assert_eq!((r.alpha_star, r.lambda_star), (0.9, 0.3));
        let r = maximize_throughput(&ring(25.0), &[0.2], &[0.4]).unwrap();
        assert_eq!((r.alpha_star, r.lambda_star), (0.2, 0.4));
        assert!(r.converged);
    }

    #[test]
    fn sweep_is_exhaustive() {
        let lambdas = step_grid(0.9, 0.1);
        let cfg = ring(25.0);
        let r = maximize_ergodic(&cfg, 0.9, &lambdas).unwrap();
        for &l in &lambdas {
            let c = ergodic_capacity(&build_links(&cfg.with_factors(0.9, l)).unwrap()).unwrap();
            assert!(r.objective_value >= c);
        }
    }

    #[test]
    fn step_grid_is_clean() {
        assert_eq!(step_grid(0.3, 0.1), vec![0.0, 0.1, 0.2, 0.3]);
        assert_eq!(step_grid(0.9, 0.1).len(), 10);
    }

    #[test]
    fn csv_columns() {
        let r = maximize_ergodic(&ring(25.0), 0.9, &[0.0]).unwrap();
        let mut buf = Vec::new();
        OptimizationResult::write_csv(&[r], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("objective_kind,alpha_star,lambda_star,value,evaluations,converged\nergodic_capacity,0.9,0,"));
    }
}
