//! First-order stochastic ordering of the best relay's SNR under parameter changes.
//!
//! `Y` is stochastically larger than `X` when `F_Y(γ) ≤ F_X(γ)` for every `γ`. Checks run
//! on the asymptotic CDF `exp(−u(γ))`; an empirical variant widens the tolerance to three
//! times the DKW confidence band of the two samples.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evt::{approx_max_cdf, u_of_gamma};
use crate::exact_stats::{geometric_grid, EmpiricalCdf};
use crate::metrics::tail_cutoff;
use crate::scenario::{build_links, LinkParams, ScenarioConfig};

pub const GRID_POINTS: usize = 400;
/// SNR (dB) separating the low regime from the rest.
pub const LOW_SNR_PIVOT_DB: f64 = 10.0;
pub const HIGH_SNR_PIVOT_DB: f64 = 30.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parameter {
    SourcePower,
    TsFactor,
    NoisePower,
    PsFactor,
}

impl Parameter {
    pub fn as_str(self) -> &'static str {
        match self {
            Parameter::SourcePower => "source_power",
            Parameter::TsFactor => "ts_factor",
            Parameter::NoisePower => "noise_power",
            Parameter::PsFactor => "ps_factor",
        }
    }

    /// Current value of this parameter in `config` (source power in dBm).
    pub fn get(self, config: &ScenarioConfig) -> f64 {
        match self {
            Parameter::SourcePower => config.source_snr_dbm,
            Parameter::TsFactor => config.ts_factor,
            Parameter::NoisePower => config.noise_power,
            Parameter::PsFactor => config.ps_factor,
        }
    }

    pub fn set(self, config: &ScenarioConfig, value: f64) -> ScenarioConfig {
        let mut c = config.clone();
        match self {
            Parameter::SourcePower => c.source_snr_dbm = value,
            Parameter::TsFactor => c.ts_factor = value,
            Parameter::NoisePower => c.noise_power = value,
            Parameter::PsFactor => c.ps_factor = value,
        }
        c
    }
}

/// How the second distribution compares with the first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    StLarger,
    StSmaller,
    Indeterminate,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::StLarger => "st_larger",
            Direction::StSmaller => "st_smaller",
            Direction::Indeterminate => "indeterminate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Low,
    Mid,
    High,
}

impl Regime {
    pub fn from_snr_db(snr_db: f64) -> Self {
        if snr_db < LOW_SNR_PIVOT_DB {
            Regime::Low
        } else if snr_db < HIGH_SNR_PIVOT_DB {
            Regime::Mid
        } else {
            Regime::High
        }
    }
}

/// Outcome of a dominance check of `b` against `a`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderingVerdict {
    pub parameter: Option<Parameter>,
    pub direction: Direction,
    /// Violation of the reported direction; for `indeterminate`, the smaller of the two.
    pub max_violation: f64,
    /// `max(F_b − F_a, 0)`: how far `b` is from being stochastically larger.
    pub larger_violation: f64,
    /// `max(F_a − F_b, 0)`: how far `b` is from being stochastically smaller.
    pub smaller_violation: f64,
    pub grid: Vec<f64>,
}

impl OrderingVerdict {
    fn from_differences(grid: Vec<f64>, diffs: impl Iterator<Item = f64>, tol: f64) -> Self {
        let mut larger_violation = 0.0f64;
        let mut smaller_violation = 0.0f64;
        for d in diffs {
            // d = F_b − F_a
            larger_violation = larger_violation.max(d);
            smaller_violation = smaller_violation.max(-d);
        }
        let (direction, max_violation) = if larger_violation <= tol {
            (Direction::StLarger, larger_violation)
        } else if smaller_violation <= tol {
            (Direction::StSmaller, smaller_violation)
        } else {
            (
                Direction::Indeterminate,
                larger_violation.min(smaller_violation),
            )
        };
        Self {
            parameter: None,
            direction,
            max_violation,
            larger_violation,
            smaller_violation,
            grid,
        }
    }

    pub fn with_parameter(mut self, parameter: Parameter) -> Self {
        self.parameter = Some(parameter);
        self
    }

    /// CSV with columns `parameter,direction,max_violation`.
    pub fn write_csv<W: Write>(verdicts: &[OrderingVerdict], writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["parameter", "direction", "max_violation"])?;
        for v in verdicts {
            w.write_record([
                v.parameter.map_or("", Parameter::as_str).to_string(),
                v.direction.as_str().to_string(),
                v.max_violation.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Compares the asymptotic CDFs of two networks on `grid`; the verdict describes `b`.
pub fn check_dominance(
    links_a: &[LinkParams],
    links_b: &[LinkParams],
    grid: &[f64],
    tol: f64,
) -> Result<OrderingVerdict> {
    check_grid(grid)?;
    let diffs = grid
        .iter()
        .map(|&g| approx_max_cdf(links_b, g) - approx_max_cdf(links_a, g));
    Ok(OrderingVerdict::from_differences(grid.to_vec(), diffs, tol))
}

/// Empirical variant: tolerance is `3 ×` the 95% DKW band of each sample, summed.
pub fn check_dominance_empirical(
    samples_a: &[f64],
    samples_b: &[f64],
    grid: &[f64],
) -> Result<OrderingVerdict> {
    check_grid(grid)?;
    let a = EmpiricalCdf::new(samples_a)?;
    let b = EmpiricalCdf::new(samples_b)?;
    let dkw = |n: usize| ((2.0f64 / 0.05).ln() / (2.0 * n as f64)).sqrt();
    let tol = 3.0 * (dkw(a.len()) + dkw(b.len()));
    let diffs = grid.iter().map(|&g| b.eval(g) - a.eval(g));
    Ok(OrderingVerdict::from_differences(grid.to_vec(), diffs, tol))
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() || grid[0] <= 0.0 || grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::domain(
            "check_dominance",
            "grid must be positive and strictly increasing",
        ));
    }
    Ok(())
}

/// Geometric grid over the central 99.8% of the asymptotic law of `links`.
///
/// When the law has an atom at zero above the 0.1% level, the grid starts four decades
/// below the upper end instead.
pub fn reference_grid(links: &[LinkParams], n: usize) -> Result<Vec<f64>> {
    if links.is_empty() || u_of_gamma(links, 0.0) == 0.0 {
        return Err(Error::domain(
            "reference_grid",
            "the reference law is degenerate at zero",
        ));
    }
    let hi = tail_cutoff(links, -(0.999f64).ln());
    let lo = tail_cutoff(links, -(0.001f64).ln());
    let hi = if hi > 0.0 { hi } else { 1.0 };
    let lo = if lo > 0.0 && lo < hi { lo } else { hi * 1e-4 };
    geometric_grid(lo, hi, n)
}

/// The ordering implied by moving `parameter` from `old_value` to `new_value`.
///
/// Power-splitting changes are only ordered at low SNR, where less splitting wins.
pub fn predict_order(
    parameter: Parameter,
    old_value: f64,
    new_value: f64,
    regime: Regime,
) -> Direction {
    let up = if new_value >= old_value {
        Direction::StLarger
    } else {
        Direction::StSmaller
    };
    let down = if new_value <= old_value {
        Direction::StLarger
    } else {
        Direction::StSmaller
    };
    match parameter {
        Parameter::SourcePower | Parameter::TsFactor => up,
        Parameter::NoisePower => down,
        Parameter::PsFactor => match regime {
            Regime::Low => down,
            Regime::Mid | Regime::High => Direction::Indeterminate,
        },
    }
}

/// Builds both scenarios, checks dominance on the reference grid of the original, and
/// labels the verdict with `parameter`.
pub fn verify_parameter_change(
    config: &ScenarioConfig,
    parameter: Parameter,
    new_value: f64,
    tol: f64,
) -> Result<OrderingVerdict> {
    let a = build_links(config)?;
    let b = build_links(&parameter.set(config, new_value))?;
    let grid = reference_grid(&a, GRID_POINTS)?;
    Ok(check_dominance(&a, &b, &grid, tol)?.with_parameter(parameter))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn baseline() -> ScenarioConfig {
        let d2 = (0..12).map(|i| 0.5 + 0.2 * i as f64 / 11.0).collect();
        ScenarioConfig::with_distances(vec![0.65; 12], d2)
    }

    #[test]
    fn identical_links_are_weakly_larger() {
        let links = build_links(&baseline()).unwrap();
        let grid = reference_grid(&links, GRID_POINTS).unwrap();
        let v = check_dominance(&links, &links, &grid, 1e-12).unwrap();
        assert_eq!(v.direction, Direction::StLarger);
        assert_eq!(v.max_violation, 0.0);
        assert_eq!(v.smaller_violation, 0.0);
        assert_eq!(v.grid.len(), GRID_POINTS);
    }

    #[test]
    fn doubling_source_power_is_larger() {
        let cfg = baseline();
        let v = verify_parameter_change(
            &cfg,
            Parameter::SourcePower,
            cfg.source_snr_dbm + 10.0 * 2f64.log10(),
            1e-9,
        )
        .unwrap();
        assert_eq!(v.direction, Direction::StLarger);
        assert_eq!(v.parameter, Some(Parameter::SourcePower));
    }

    #[test]
    fn predictions() {
        assert_eq!(
            predict_order(Parameter::SourcePower, 10.0, 20.0, Regime::Mid),
            Direction::StLarger
        );
        assert_eq!(
            predict_order(Parameter::TsFactor, 0.2, 0.4, Regime::Mid),
            Direction::StLarger
        );
        assert_eq!(
            predict_order(Parameter::NoisePower, 1.0, 2.0, Regime::Mid),
            Direction::StSmaller
        );
        assert_eq!(
            predict_order(Parameter::PsFactor, 0.2, 0.6, Regime::Mid),
            Direction::Indeterminate
        );
        assert_eq!(
            predict_order(Parameter::PsFactor, 0.6, 0.2, Regime::Low),
            Direction::StLarger
        );
        assert_eq!(
            predict_order(Parameter::PsFactor, 0.2, 0.6, Regime::High),
            Direction::Indeterminate
        );
    }

    #[test]
    fn regimes() {
        assert_eq!(Regime::from_snr_db(4.0), Regime::Low);
        assert_eq!(Regime::from_snr_db(25.0), Regime::Mid);
        assert_eq!(Regime::from_snr_db(40.0), Regime::High);
    }

    #[test]
    fn rejects_bad_grids() {
        let links = [LinkParams::new(1.0, 0.1)];
        assert!(check_dominance(&links, &links, &[], 0.0).is_err());
        assert!(check_dominance(&links, &links, &[0.0, 1.0], 0.0).is_err());
        assert!(check_dominance(&links, &links, &[2.0, 1.0], 0.0).is_err());
    }

    #[test]
    fn csv_columns() {
        let links = build_links(&baseline()).unwrap();
        let grid = reference_grid(&links, 10).unwrap();
        let v = check_dominance(&links, &links, &grid, 0.0)
            .unwrap()
            .with_parameter(Parameter::NoisePower);
        let mut buf = Vec::new();
        OrderingVerdict::write_csv(&[v], &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "parameter,direction,max_violation\nnoise_power,st_larger,0\n"
        );
    }
}
