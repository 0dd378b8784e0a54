//! Network geometry and energy-harvesting split to per-relay link parameters.
//!
//! Every relay `ℓ` is summarized by a pair of exponential **rates** (not scales):
//!
//! * `theta`: the first-hop SNR `γ₁ ~ Exp(rate θ)`, mean `1/θ`;
//! * `nu`: the second-hop multiplier `φ₂ ~ Exp(rate ν)`, CDF `1 − e^{−yν}`,
//!
//! and the end-to-end SNR of the relay is `γ₁ · min(1, φ₂)`. With a noise power `σ²`
//! shared by relays and destination,
//!
//! ```text
//! θ = σ² d₁^ζ / ((1 − λ) P_s)
//! ν = (1 − λ)(1 − α) d₂^ζ / (η (2α + λ(1 − α)))
//! ```
//!
//! When no energy is harvested at all (`α = λ = 0`) the relays cannot transmit and
//! `ν = +∞`, which makes every end-to-end SNR zero.
//!
//! Sampling draws each relay from its own ChaCha8 stream (`stream = position in the link
//! list`), so batches are bit-identical for a given seed no matter how the work is spread
//! over threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_PATH_LOSS_EXPONENT: f64 = 2.7;

const D1_STREAM: u64 = 1;
const D2_STREAM: u64 = 2;

/// `10^(db/10)`.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// Relay distances, either listed or drawn uniformly from an interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DistanceSpec {
    Explicit(Vec<f64>),
    Uniform { min: f64, max: f64, seed: u64 },
}

impl DistanceSpec {
    /// Distances for `count` relays. Explicit lists are tiled (repeated cyclically) to
    /// `count` entries so a relay pattern can be reused for several network sizes.
    pub fn resolve(&self, count: usize, stream: u64) -> Vec<f64> {
        match self {
            DistanceSpec::Explicit(values) => {
                if values.is_empty() {
                    return Vec::new();
                }
                values.iter().copied().cycle().take(count).collect()
            }
            DistanceSpec::Uniform { min, max, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                rng.set_stream(stream);
                (0..count)
                    .map(|_| min + (max - min) * rng.random::<f64>())
                    .collect()
            }
        }
    }

    pub fn with_seed(&self, seed: u64) -> DistanceSpec {
        match self {
            DistanceSpec::Uniform { min, max, .. } => DistanceSpec::Uniform {
                min: *min,
                max: *max,
                seed,
            },
            other => other.clone(),
        }
    }
}

/// On-disk scenario document. Field names follow the JSON keys exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(rename = "L")]
    pub num_relays: usize,
    pub d1: DistanceSpec,
    pub d2: DistanceSpec,
    #[serde(default = "default_zeta")]
    pub zeta: f64,
    pub gamma_s_dbm: f64,
    pub sigma2: f64,
    pub eta: f64,
    pub alpha: f64,
    pub lambda: f64,
    #[serde(rename = "T", default = "default_slot")]
    pub slot_length: f64,
}

fn default_zeta() -> f64 {
    DEFAULT_PATH_LOSS_EXPONENT
}

fn default_slot() -> f64 {
    1.0
}

impl ScenarioFile {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    /// Resolves distances. Explicit lists must have exactly `L` entries here.
    pub fn resolve(&self) -> Result<ScenarioConfig> {
        for (name, spec) in [("d1", &self.d1), ("d2", &self.d2)] {
            if let DistanceSpec::Explicit(v) = spec {
                if v.len() != self.num_relays {
                    return Err(Error::config(
                        "distance_count_mismatch",
                        format!(
                            "{name} lists {} distances for L = {}",
                            v.len(),
                            self.num_relays
                        ),
                    ));
                }
            }
        }
        self.resolve_for(self.num_relays)
    }

    /// Resolves the scenario for a different relay count (lists are tiled, intervals are
    /// redrawn with the same seed).
    pub fn resolve_for(&self, num_relays: usize) -> Result<ScenarioConfig> {
        let config = ScenarioConfig {
            num_relays,
            d1: self.d1.resolve(num_relays, D1_STREAM),
            d2: self.d2.resolve(num_relays, D2_STREAM),
            path_loss_exponent: self.zeta,
            source_snr_dbm: self.gamma_s_dbm,
            noise_power: self.sigma2,
            eh_efficiency: self.eta,
            ts_factor: self.alpha,
            ps_factor: self.lambda,
            slot_length: self.slot_length,
        };
        let mut violations = self.interval_violations();
        violations.extend(config.violations());
        match violations.into_iter().next() {
            Some(v) => Err(Error::config(v.code, v.message)),
            None => Ok(config),
        }
    }

    /// Every invariant the document violates; empty when it is valid.
    pub fn violations(&self) -> Vec<Violation> {
        let mut out = self.interval_violations();
        for (name, spec) in [("d1", &self.d1), ("d2", &self.d2)] {
            if let DistanceSpec::Explicit(v) = spec {
                if v.len() != self.num_relays {
                    out.push(Violation::new(
                        "distance_count_mismatch",
                        format!(
                            "{name} lists {} distances for L = {}",
                            v.len(),
                            self.num_relays
                        ),
                    ));
                }
            }
        }
        let config = ScenarioConfig {
            num_relays: self.num_relays,
            d1: self.d1.resolve(self.num_relays, D1_STREAM),
            d2: self.d2.resolve(self.num_relays, D2_STREAM),
            path_loss_exponent: self.zeta,
            source_snr_dbm: self.gamma_s_dbm,
            noise_power: self.sigma2,
            eh_efficiency: self.eta,
            ts_factor: self.alpha,
            ps_factor: self.lambda,
            slot_length: self.slot_length,
        };
        for v in config.violations() {
            if !out.iter().any(|o| o.code == v.code) {
                out.push(v);
            }
        }
        out
    }

    fn interval_violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for (name, spec) in [("d1", &self.d1), ("d2", &self.d2)] {
            if let DistanceSpec::Uniform { min, max, .. } = spec {
                if !(min.is_finite() && max.is_finite() && min <= max) {
                    out.push(Violation::new(
                        "invalid_distance_interval",
                        format!("{name} interval ({min}, {max}) is not a valid range"),
                    ));
                } else if *min <= 0.0 {
                    out.push(Violation::new(
                        "nonpositive_distance",
                        format!("{name} interval ({min}, {max}) admits nonpositive distances"),
                    ));
                }
            }
        }
        out
    }
}

/// A named invariant violation found by validation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub code: &'static str,
    pub message: String,
}

impl Violation {
    fn new(code: &'static str, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

/// Full physical parameterization of the relay network.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub num_relays: usize,
    /// Source→relay distances, normalized to a unit source–destination separation.
    pub d1: Vec<f64>,
    /// Relay→destination distances.
    pub d2: Vec<f64>,
    pub path_loss_exponent: f64,
    /// Source transmit power in dBm; `σ²` is in the same (milliwatt) units, so with
    /// `σ² = 1` the value is the source SNR in dB.
    pub source_snr_dbm: f64,
    pub noise_power: f64,
    pub eh_efficiency: f64,
    pub ts_factor: f64,
    pub ps_factor: f64,
    /// Slot length. It cancels out of every statistic and is carried for completeness.
    pub slot_length: f64,
}

impl ScenarioConfig {
    /// Relays at explicit positions with the remaining parameters at their
    /// usual defaults (γ_s = 25 dBm, σ² = 1, η = 0.9, α = 0.3, λ = 0.4, ζ = 2.7).
    pub fn with_distances(d1: Vec<f64>, d2: Vec<f64>) -> Self {
        Self {
            num_relays: d1.len(),
            d1,
            d2,
            path_loss_exponent: DEFAULT_PATH_LOSS_EXPONENT,
            source_snr_dbm: 25.0,
            noise_power: 1.0,
            eh_efficiency: 0.9,
            ts_factor: 0.3,
            ps_factor: 0.4,
            slot_length: 1.0,
        }
    }

    /// Linear source power `P_s`.
    pub fn source_power(&self) -> f64 {
        db_to_linear(self.source_snr_dbm)
    }

    /// Linear source SNR `P_s / σ²`.
    pub fn source_snr(&self) -> f64 {
        self.source_power() / self.noise_power
    }

    /// Source SNR `P_s / σ²` in dB.
    pub fn source_snr_db(&self) -> f64 {
        linear_to_db(self.source_snr())
    }

    pub fn with_factors(&self, ts_factor: f64, ps_factor: f64) -> Self {
        Self {
            ts_factor,
            ps_factor,
            ..self.clone()
        }
    }

    pub fn with_source_snr_dbm(&self, source_snr_dbm: f64) -> Self {
        Self {
            source_snr_dbm,
            ..self.clone()
        }
    }

    pub fn with_noise_power(&self, noise_power: f64) -> Self {
        Self {
            noise_power,
            ..self.clone()
        }
    }

    /// Every violated invariant; empty when the configuration is usable.
    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.num_relays == 0 {
            out.push(Violation::new(
                "zero_relays",
                "at least one relay is required",
            ));
        }
        if self.d1.len() != self.num_relays || self.d2.len() != self.num_relays {
            out.push(Violation::new(
                "distance_count_mismatch",
                format!(
                    "{} / {} distances for {} relays",
                    self.d1.len(),
                    self.d2.len(),
                    self.num_relays
                ),
            ));
        }
        if self
            .d1
            .iter()
            .chain(&self.d2)
            .any(|d| !(d.is_finite() && *d > 0.0))
        {
            out.push(Violation::new(
                "nonpositive_distance",
                "all distances must be finite and strictly positive",
            ));
        }
        if !(self.path_loss_exponent.is_finite() && self.path_loss_exponent > 0.0) {
            out.push(Violation::new(
                "nonpositive_path_loss_exponent",
                format!("zeta = {}", self.path_loss_exponent),
            ));
        }
        if !self.source_snr_dbm.is_finite() {
            out.push(Violation::new(
                "non_finite_source_power",
                format!("gamma_s_dbm = {}", self.source_snr_dbm),
            ));
        }
        if !(self.noise_power.is_finite() && self.noise_power > 0.0) {
            out.push(Violation::new(
                "nonpositive_noise_power",
                format!("sigma2 = {}", self.noise_power),
            ));
        }
        if !(self.eh_efficiency > 0.0 && self.eh_efficiency <= 1.0) {
            out.push(Violation::new(
                "eh_efficiency_out_of_range",
                format!("eta = {} is outside (0, 1]", self.eh_efficiency),
            ));
        }
        if self.ts_factor.is_nan() || self.ts_factor < 0.0 {
            out.push(Violation::new(
                "ts_factor_negative",
                format!("alpha = {}", self.ts_factor),
            ));
        } else if self.ts_factor >= 1.0 {
            out.push(Violation::new(
                "ts_factor_at_unity",
                format!("alpha = {} leaves no information phase", self.ts_factor),
            ));
        }
        if self.ps_factor.is_nan() || self.ps_factor < 0.0 {
            out.push(Violation::new(
                "ps_factor_negative",
                format!("lambda = {}", self.ps_factor),
            ));
        } else if self.ps_factor >= 1.0 {
            out.push(Violation::new(
                "ps_factor_at_unity",
                format!("lambda = {} leaves no power for decoding", self.ps_factor),
            ));
        }
        if !(self.slot_length.is_finite() && self.slot_length > 0.0) {
            out.push(Violation::new(
                "nonpositive_slot_length",
                format!("T = {}", self.slot_length),
            ));
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        match self.violations().into_iter().next() {
            Some(v) => Err(Error::config(v.code, v.message)),
            None => Ok(()),
        }
    }
}

/// Rate pair of one relay link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkParams {
    /// First-hop exponential rate.
    pub theta: f64,
    /// Second-hop multiplicative exponential rate; `+∞` when nothing is harvested.
    pub nu: f64,
    pub link_index: usize,
}

impl LinkParams {
    pub fn new(theta: f64, nu: f64) -> Self {
        Self {
            theta,
            nu,
            link_index: 0,
        }
    }
}

/// Per-link rates for a scenario, in relay order.
pub fn build_links(config: &ScenarioConfig) -> Result<Vec<LinkParams>> {
    config.validate()?;
    let zeta = config.path_loss_exponent;
    let alpha = config.ts_factor;
    let lambda = config.ps_factor;
    let first_hop_scale = config.noise_power / ((1.0 - lambda) * config.source_power());
    let harvest = config.eh_efficiency * (2.0 * alpha + lambda * (1.0 - alpha));
    let second_hop_scale = if harvest > 0.0 {
        (1.0 - lambda) * (1.0 - alpha) / harvest
    } else {
        f64::INFINITY
    };
    Ok(config
        .d1
        .iter()
        .zip(&config.d2)
        .enumerate()
        .map(|(link_index, (d1, d2))| LinkParams {
            theta: first_hop_scale * d1.powf(zeta),
            nu: second_hop_scale * d2.powf(zeta),
            link_index,
        })
        .collect())
}

/// Seeded Monte Carlo draws of the end-to-end SNR of every link and of the best link.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBatch {
    pub seed: u64,
    /// `per_link_samples[ℓ][j]`: draw `j` of link `ℓ` (linear SNR).
    pub per_link_samples: Vec<Vec<f64>>,
    /// `max_samples[j] = max_ℓ per_link_samples[ℓ][j]`.
    pub max_samples: Vec<f64>,
}

impl SampleBatch {
    pub fn len(&self) -> usize {
        self.max_samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.max_samples.is_empty()
    }
}

fn link_rng(seed: u64, position: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(position as u64);
    rng
}

#[inline]
fn draw<R: Rng>(rng: &mut R, link: &LinkParams) -> f64 {
    let first: f64 = rng.sample(Exp1);
    let second: f64 = rng.sample(Exp1);
    let gamma1 = first / link.theta;
    let phi2 = second / link.nu;
    gamma1 * phi2.min(1.0)
}

/// `n` draws of link `position` of a batch seeded with `seed`.
pub fn sample_link(link: &LinkParams, position: usize, n: usize, seed: u64) -> Vec<f64> {
    let mut rng = link_rng(seed, position);
    (0..n).map(|_| draw(&mut rng, link)).collect()
}

/// Draws `n` realizations of every link and their maxima.
pub fn sample_batch(links: &[LinkParams], n: usize, seed: u64) -> Result<SampleBatch> {
    check_sampling_args(links, n)?;
    let per_link_samples: Vec<Vec<f64>> = links
        .par_iter()
        .enumerate()
        .map(|(pos, link)| sample_link(link, pos, n, seed))
        .collect();
    let mut max_samples = vec![f64::NEG_INFINITY; n];
    for row in &per_link_samples {
        for (m, v) in max_samples.iter_mut().zip(row) {
            *m = m.max(*v);
        }
    }
    Ok(SampleBatch {
        seed,
        per_link_samples,
        max_samples,
    })
}

/// The `max_samples` of [`sample_batch`] without keeping the per-link matrix.
pub fn sample_maxima(links: &[LinkParams], n: usize, seed: u64) -> Result<Vec<f64>> {
    check_sampling_args(links, n)?;
    let maxima = links
        .par_iter()
        .enumerate()
        .fold(
            || vec![f64::NEG_INFINITY; n],
            |mut acc, (pos, link)| {
                let mut rng = link_rng(seed, pos);
                for m in acc.iter_mut() {
                    *m = m.max(draw(&mut rng, link));
                }
                acc
            },
        )
        .reduce(
            || vec![f64::NEG_INFINITY; n],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x = x.max(y);
                }
                a
            },
        );
    Ok(maxima)
}

fn check_sampling_args(links: &[LinkParams], n: usize) -> Result<()> {
    if links.is_empty() {
        return Err(Error::domain("sample_batch", "no links to sample"));
    }
    if n == 0 {
        return Err(Error::domain(
            "sample_batch",
            "sample count must be positive",
        ));
    }
    if let Some(l) = links
        .iter()
        .find(|l| !(l.theta > 0.0 && l.theta.is_finite()) || l.nu.is_nan() || l.nu < 0.0)
    {
        return Err(Error::domain(
            "sample_batch",
            format!("invalid link rates theta = {}, nu = {}", l.theta, l.nu),
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_config() -> ScenarioConfig {
        ScenarioConfig {
            num_relays: 1,
            d1: vec![1.0],
            d2: vec![1.0],
            path_loss_exponent: 3.3,
            source_snr_dbm: 0.0,
            noise_power: 1.0,
            eh_efficiency: 1.0,
            ts_factor: 1.0 / 3.0,
            ps_factor: 0.0,
            slot_length: 1.0,
        }
    }

    #[test]
    fn unit_substitution() {
        let links = build_links(&unit_config()).unwrap();
        assert!((links[0].theta - 1.0).abs() < 1e-15);
        assert!((links[0].nu - 1.0).abs() < 1e-15);
    }

    #[test]
    fn first_hop_ignores_harvesting_split_when_lambda_is_zero() {
        let base = ScenarioConfig {
            d1: vec![0.7],
            source_snr_dbm: 12.0,
            ..unit_config()
        };
        let expected = 0.7f64.powf(3.3) / db_to_linear(12.0);
        for (alpha, eta) in [(0.1, 0.5), (0.5, 0.9), (0.8, 0.2)] {
            let cfg = ScenarioConfig {
                eh_efficiency: eta,
                ..base.with_factors(alpha, 0.0)
            };
            let theta = build_links(&cfg).unwrap()[0].theta;
            assert!(((theta - expected) / expected).abs() < 1e-14);
        }
    }

    #[test]
    fn baseline_link_matches_high_precision_values() {
        // 50-digit evaluation of both rate formulas
        let cfg = ScenarioConfig::with_distances(vec![0.65], vec![0.6]);
        let link = build_links(&cfg).unwrap()[0];
        let theta = 0.001_647_080_450_697_470_569_725_306;
        let nu = 0.133_515_745_442_754_712_947_165_7;
        assert!(((link.theta - theta) / theta).abs() < 1e-13);
        assert!(((link.nu - nu) / nu).abs() < 1e-13);
    }

    #[test]
    fn no_harvesting_means_infinite_nu() {
        let cfg = unit_config().with_factors(0.0, 0.0);
        assert_eq!(build_links(&cfg).unwrap()[0].nu, f64::INFINITY);
    }

    #[test]
    fn rejects_unit_factors_and_bad_distances() {
        let err = build_links(&unit_config().with_factors(1.0, 0.0)).unwrap_err();
        assert!(matches!(
            err,
            Error::InvalidConfig {
                code: "ts_factor_at_unity",
                ..
            }
        ));
        let err = build_links(&unit_config().with_factors(0.2, 1.0)).unwrap_err();
        assert!(matches!(
            err,
            Error::InvalidConfig {
                code: "ps_factor_at_unity",
                ..
            }
        ));
        let cfg = ScenarioConfig {
            d2: vec![-0.5],
            ..unit_config()
        };
        let err = build_links(&cfg).unwrap_err();
        assert!(matches!(
            err,
            Error::InvalidConfig {
                code: "nonpositive_distance",
                ..
            }
        ));
    }

    #[test]
    fn db_round_trip() {
        for db in [-30.0, -3.0, 0.0, 4.0, 25.0, 40.0, 90.0] {
            let back = linear_to_db(db_to_linear(db));
            assert!((back - db).abs() <= 1e-12 * db.abs().max(1.0));
        }
    }

    #[test]
    fn scenario_file_parses_both_distance_forms() {
        let text = r#"{"L": 3, "d1": [0.5, 0.6, 0.7], "d2": {"min": 0.5, "max": 0.7, "seed": 9},
                      "zeta": 2.7, "gamma_s_dbm": 25, "sigma2": 1, "eta": 0.9,
                      "alpha": 0.3, "lambda": 0.4, "T": 1}"#;
        let file = ScenarioFile::from_json(text).unwrap();
        let cfg = file.resolve().unwrap();
        assert_eq!(cfg.d1, vec![0.5, 0.6, 0.7]);
        assert!(cfg.d2.iter().all(|d| (0.5..0.7).contains(d)));
        assert_eq!(cfg, file.resolve().unwrap());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = r#"{"L": 1, "d1": [0.5], "d2": [0.5], "gamma_s_dbm": 25, "sigma2": 1,
                      "eta": 0.9, "alpha": 0.3, "lambda": 0.4, "rho": 1}"#;
        assert!(ScenarioFile::from_json(text).is_err());
    }

    #[test]
    fn explicit_lists_tile() {
        let spec = DistanceSpec::Explicit(vec![0.5, 0.8]);
        assert_eq!(spec.resolve(5, 1), vec![0.5, 0.8, 0.5, 0.8, 0.5]);
    }

    #[test]
    fn batch_maxima_are_exact_row_maxima() {
        let links = [
            LinkParams::new(1.0, 0.2),
            LinkParams::new(0.5, 1.0),
            LinkParams::new(2.0, 0.0),
        ];
        let batch = sample_batch(&links, 1000, 3).unwrap();
        for j in 0..batch.len() {
            let m = batch
                .per_link_samples
                .iter()
                .map(|r| r[j])
                .fold(f64::NEG_INFINITY, f64::max);
            assert_eq!(m, batch.max_samples[j]);
        }
        assert_eq!(sample_maxima(&links, 1000, 3).unwrap(), batch.max_samples);
    }

    #[test]
    fn same_seed_same_batch() {
        let links = [LinkParams::new(1.0, 0.2), LinkParams::new(3.0, 0.7)];
        assert_eq!(
            sample_batch(&links, 500, 11).unwrap(),
            sample_batch(&links, 500, 11).unwrap()
        );
        assert_ne!(
            sample_batch(&links, 500, 11).unwrap().max_samples,
            sample_batch(&links, 500, 12).unwrap().max_samples
        );
    }

    #[test]
    fn huge_nu_drives_samples_to_zero() {
        let link = LinkParams::new(1.0, 1e6);
        let s = sample_link(&link, 0, 100_000, 5);
        let mean = s.iter().sum::<f64>() / s.len() as f64;
        assert!(mean < 5e-6, "{mean}");
        let s = sample_link(&LinkParams::new(1.0, f64::INFINITY), 0, 100, 5);
        assert!(s.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn sampling_rejects_empty_input() {
        assert!(sample_batch(&[], 10, 1).is_err());
        assert!(sample_batch(&[LinkParams::new(1.0, 1.0)], 0, 1).is_err());
    }
}
