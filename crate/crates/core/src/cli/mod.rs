//! Experiment manifests, the experiment runner and the command-line front end.
//!
//! A manifest names one experiment, the scenario it runs on (a path relative to the
//! manifest, or an inline object), Monte Carlo settings and seeds. Every file a run writes
//! starts with a `# config_hash=<sha256> seed=<n>` line followed by a CSV header, and every
//! run writes `summary.csv` in long format (`experiment,label,metric,value`).

mod experiments;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::scenario::{ScenarioFile, Violation};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    CdfConvergence,
    CdfCompare,
    IidPitfall,
    CapacitySweep,
    OutageSurface,
    OrderingCheck,
    OptimizeOutage,
    OptimizeErgodic,
    OptimizeThroughput,
    ProtocolCompare,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 10] = [
        ExperimentKind::CdfConvergence,
        ExperimentKind::CdfCompare,
        ExperimentKind::IidPitfall,
        ExperimentKind::CapacitySweep,
        ExperimentKind::OutageSurface,
        ExperimentKind::OrderingCheck,
        ExperimentKind::OptimizeOutage,
        ExperimentKind::OptimizeErgodic,
        ExperimentKind::OptimizeThroughput,
        ExperimentKind::ProtocolCompare,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentKind::CdfConvergence => "cdf_convergence",
            ExperimentKind::CdfCompare => "cdf_compare",
            ExperimentKind::IidPitfall => "iid_pitfall",
            ExperimentKind::CapacitySweep => "capacity_sweep",
            ExperimentKind::OutageSurface => "outage_surface",
            ExperimentKind::OrderingCheck => "ordering_check",
            ExperimentKind::OptimizeOutage => "optimize_outage",
            ExperimentKind::OptimizeErgodic => "optimize_ergodic",
            ExperimentKind::OptimizeThroughput => "optimize_throughput",
            ExperimentKind::ProtocolCompare => "protocol_compare",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            ExperimentKind::CdfConvergence => {
                "normalized maximum vs the standard Gumbel law for growing relay counts"
            }
            ExperimentKind::CdfCompare => {
                "empirical, exact product and exp(-u) CDFs of the best relay"
            }
            ExperimentKind::IidPitfall => {
                "mean-theta i.i.d. baseline vs the non-identical approximation"
            }
            ExperimentKind::CapacitySweep => {
                "ergodic capacity, throughput and outage vs relay count and source power"
            }
            ExperimentKind::OutageSurface => "outage probability over the (alpha, lambda) grid",
            ExperimentKind::OrderingCheck => {
                "stochastic ordering under changes of source power, alpha, noise and lambda"
            }
            ExperimentKind::OptimizeOutage => "outage-minimizing lambda at alpha = alpha_max",
            ExperimentKind::OptimizeErgodic => "capacity-maximizing lambda over a finite set",
            ExperimentKind::OptimizeThroughput => {
                "throughput-maximizing (alpha, lambda) grid search"
            }
            ExperimentKind::ProtocolCompare => {
                "time switching, power splitting and hybrid over a source power sweep"
            }
        }
    }

    pub fn uses_monte_carlo(self) -> bool {
        matches!(
            self,
            ExperimentKind::CdfConvergence
                | ExperimentKind::CdfCompare
                | ExperimentKind::IidPitfall
                | ExperimentKind::CapacitySweep
        )
    }
}

/// Scenario given by path (relative to the manifest) or inline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScenarioRef {
    Path(PathBuf),
    Inline(ScenarioFile),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Seeds {
    /// Replaces the seed of every interval-drawn distance list.
    pub geometry: Option<u64>,
    pub sampling: Option<u64>,
}

/// Knobs shared by the experiments; each experiment reads the ones it needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentSettings {
    /// Relay counts to sweep; empty means the scenario's own `L`.
    pub relay_counts: Vec<usize>,
    pub grid_points: usize,
    pub theta_bins: usize,
    pub beta_count_fraction: f64,
    pub beta_tail_bound: f64,
    pub gamma_th_db: f64,
    /// Source powers to sweep; empty means the scenario's own value.
    pub gamma_s_sweep_dbm: Vec<f64>,
    pub alpha_max: f64,
    pub lambda_max: f64,
    pub factor_step: f64,
    pub pitfall_relays: usize,
    pub pitfall_nu: f64,
    pub pitfall_theta_seed: u64,
}

impl Default for ExperimentSettings {
    fn default() -> Self {
        Self {
            relay_counts: Vec::new(),
            grid_points: 200,
            theta_bins: 8,
            beta_count_fraction: 0.05,
            beta_tail_bound: 0.1,
            gamma_th_db: 15.0,
            gamma_s_sweep_dbm: Vec::new(),
            alpha_max: 0.9,
            lambda_max: 0.9,
            factor_step: 0.1,
            pitfall_relays: 64,
            pitfall_nu: 0.2,
            pitfall_theta_seed: 2024,
        }
    }
}

fn default_mc() -> usize {
    100_000
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentManifest {
    pub experiment: ExperimentKind,
    pub scenario: ScenarioRef,
    #[serde(default = "default_mc")]
    pub monte_carlo_n: usize,
    #[serde(default)]
    pub seeds: Seeds,
    #[serde(default = "default_out")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub settings: ExperimentSettings,
}

impl ExperimentManifest {
    /// Reads a manifest and inlines a referenced scenario file.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut manifest: ExperimentManifest = serde_json::from_str(&fs::read_to_string(path)?)?;
        if let ScenarioRef::Path(p) = &manifest.scenario {
            let full = path.parent().unwrap_or(Path::new(".")).join(p);
            manifest.scenario = ScenarioRef::Inline(ScenarioFile::load(full)?);
        }
        Ok(manifest)
    }

    pub fn scenario_file(&self) -> Result<ScenarioFile> {
        let mut file = match &self.scenario {
            ScenarioRef::Inline(f) => f.clone(),
            ScenarioRef::Path(p) => ScenarioFile::load(p)?,
        };
        if let Some(seed) = self.seeds.geometry {
            file.d1 = file.d1.with_seed(seed);
            file.d2 = file.d2.with_seed(seed);
        }
        Ok(file)
    }

    pub fn sampling_seed(&self) -> u64 {
        self.seeds.sampling.unwrap_or(0)
    }

    /// Every violated manifest or scenario invariant.
    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut push = |code: &'static str, message: String| {
            out.push(Violation { code, message });
        };
        if self.monte_carlo_n == 0 {
            push(
                "zero_monte_carlo_samples",
                "monte_carlo_n must be at least 1".into(),
            );
        }
        if self.experiment.uses_monte_carlo() && self.seeds.sampling.is_none() {
            push(
                "missing_sampling_seed",
                format!(
                    "{} draws Monte Carlo samples and needs seeds.sampling",
                    self.experiment.as_str()
                ),
            );
        }
        let s = &self.settings;
        if s.grid_points < 2 {
            push("grid_too_small", format!("grid_points = {}", s.grid_points));
        }
        if s.theta_bins == 0 {
            push("zero_theta_bins", "theta_bins must be at least 1".into());
        }
        if s.relay_counts.contains(&0) {
            push("zero_relays", "relay_counts contains 0".into());
        }
        if !(s.alpha_max >= 0.0 && s.alpha_max < 1.0)
            || !(s.lambda_max >= 0.0 && s.lambda_max < 1.0)
        {
            push(
                "invalid_bounds",
                format!(
                    "alpha_max = {}, lambda_max = {} must lie in [0, 1)",
                    s.alpha_max, s.lambda_max
                ),
            );
        }
        if !(s.factor_step > 0.0) {
            push(
                "invalid_factor_step",
                format!("factor_step = {}", s.factor_step),
            );
        }
        match self.scenario_file() {
            Ok(file) => out.extend(file.violations()),
            Err(e) => out.push(Violation {
                code: "unreadable_scenario",
                message: e.to_string(),
            }),
        }
        out
    }

    /// SHA-256 of the canonical JSON of everything that determines the outputs.
    pub fn config_hash(&self) -> Result<String> {
        let canonical = serde_json::json!({
            "experiment": self.experiment,
            "scenario": self.scenario_file()?,
            "monte_carlo_n": self.monte_carlo_n,
            "seeds": self.seeds,
            "settings": self.settings,
        });
        let digest = Sha256::digest(serde_json::to_vec(&canonical)?);
        Ok(hex::encode(digest))
    }
}

/// One line of `summary.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub experiment: String,
    pub label: String,
    pub metric: String,
    pub value: f64,
}

/// What a run produced.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub config_hash: String,
    pub seed: u64,
    pub summary: Vec<SummaryRow>,
    pub files: Vec<PathBuf>,
}

impl RunReport {
    /// Value of `metric` for `label`, if recorded.
    pub fn metric(&self, label: &str, metric: &str) -> Option<f64> {
        self.summary
            .iter()
            .find(|r| r.label == label && r.metric == metric)
            .map(|r| r.value)
    }
}

pub(crate) struct Output {
    dir: PathBuf,
    header: String,
    experiment: &'static str,
    files: Vec<PathBuf>,
    summary: Vec<SummaryRow>,
}

impl Output {
    pub(crate) fn file<F>(&mut self, name: &str, body: F) -> Result<()>
    where
        F: FnOnce(&mut Vec<u8>) -> Result<()>,
    {
        let mut buf = self.header.clone().into_bytes();
        body(&mut buf)?;
        let path = self.dir.join(name);
        fs::write(&path, buf)?;
        self.files.push(path);
        Ok(())
    }

    pub(crate) fn record(&mut self, label: impl Into<String>, metric: &str, value: f64) {
        self.summary.push(SummaryRow {
            experiment: self.experiment.to_string(),
            label: label.into(),
            metric: metric.to_string(),
            value,
        });
    }
}

/// Runs the experiment of `manifest`, writing into `out_dir`.
pub fn run(manifest: &ExperimentManifest, out_dir: &Path) -> Result<RunReport> {
    if let Some(v) = manifest.violations().into_iter().next() {
        return Err(Error::config(v.code, v.message));
    }
    fs::create_dir_all(out_dir)?;
    let config_hash = manifest.config_hash()?;
    let seed = manifest.sampling_seed();
    let mut out = Output {
        dir: out_dir.to_path_buf(),
        header: format!("# config_hash={config_hash} seed={seed}\n"),
        experiment: manifest.experiment.as_str(),
        files: Vec::new(),
        summary: Vec::new(),
    };
    experiments::run(manifest, &mut out)?;
    let summary = std::mem::take(&mut out.summary);
    out.file("summary.csv", |buf| {
        let mut w = csv::Writer::from_writer(buf);
        for row in &summary {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    })?;
    Ok(RunReport {
        config_hash,
        seed,
        summary,
        files: out.files,
    })
}

/// Parses a `summary.csv` written by [`run`].
pub fn read_summary(path: impl AsRef<Path>) -> Result<Vec<SummaryRow>> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)?;
    reader
        .deserialize()
        .map(|r| r.map_err(Error::from))
        .collect()
}

#[derive(Debug, Parser)]
#[command(
    name = "swipt-evt",
    version,
    about = "Extreme-value experiments for SWIPT relay selection"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the experiment described by a manifest.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (overrides the manifest's output_dir).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed_override: Option<u64>,
        #[arg(long)]
        mc_samples: Option<usize>,
    },
    /// Check a scenario or manifest without running it.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Print the available experiments.
    ListExperiments,
}

#[derive(Debug, Serialize)]
struct ErrorRecord<'a> {
    error: &'a str,
    message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    code: Option<&'a str>,
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidConfig { .. } | Error::Json(_) => EXIT_VALIDATION,
        e if e.is_numerical() => EXIT_NUMERICAL,
        _ => EXIT_FAILURE,
    }
}

fn report_error<W: Write>(e: &Error, mut stderr: W) -> i32 {
    let record = ErrorRecord {
        error: e.kind(),
        message: e.to_string(),
        code: match e {
            Error::InvalidConfig { code, .. } => Some(code),
            _ => None,
        },
    };
    let _ = writeln!(
        stderr,
        "{}",
        serde_json::to_string(&record).unwrap_or_else(|_| e.to_string())
    );
    exit_code(e)
}

#[derive(Debug, Serialize)]
struct ValidationReport<'a> {
    valid: bool,
    kind: &'a str,
    violations: Vec<Violation>,
}

fn validate<W: Write>(path: &Path, mut stdout: W) -> Result<i32> {
    let text = fs::read_to_string(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    let (kind, violations) = if value.get("experiment").is_some() {
        ("manifest", ExperimentManifest::load(path)?.violations())
    } else {
        ("scenario", ScenarioFile::from_json(&text)?.violations())
    };
    let report = ValidationReport {
        valid: violations.is_empty(),
        kind,
        violations,
    };
    writeln!(stdout, "{}", serde_json::to_string_pretty(&report)?)?;
    Ok(if report.valid {
        EXIT_OK
    } else {
        EXIT_VALIDATION
    })
}

/// Executes a parsed command line and returns the process exit code.
pub fn execute<O: Write, E: Write>(cli: Cli, mut stdout: O, stderr: E) -> i32 {
    let result = match cli.command {
        Command::ListExperiments => {
            for kind in ExperimentKind::ALL {
                let _ = writeln!(stdout, "{:<20} {}", kind.as_str(), kind.description());
            }
            Ok(EXIT_OK)
        }
        Command::Validate { config } => validate(&config, &mut stdout),
        Command::Run {
            config,
            out,
            seed_override,
            mc_samples,
        } => ExperimentManifest::load(&config).and_then(|mut m| {
            if let Some(seed) = seed_override {
                m.seeds.sampling = Some(seed);
            }
            if let Some(n) = mc_samples {
                m.monte_carlo_n = n;
            }
            let dir = out.unwrap_or_else(|| m.output_dir.clone());
            let report = run(&m, &dir)?;
            for f in &report.files {
                let _ = writeln!(stdout, "{}", f.display());
            }
            Ok(EXIT_OK)
        }),
    };
    result.unwrap_or_else(|e| report_error(&e, stderr))
}

/// Entry point of the binary.
pub fn main_from_env() -> i32 {
    let cli = Cli::parse();
    execute(cli, std::io::stdout().lock(), std::io::stderr().lock())
}

pub(crate) fn relay_counts(manifest: &ExperimentManifest, default: &[usize]) -> Result<Vec<usize>> {
    let s = &manifest.settings.relay_counts;
    if !s.is_empty() {
        return Ok(s.clone());
    }
    if !default.is_empty() {
        return Ok(default.to_vec());
    }
    Ok(vec![manifest.scenario_file()?.num_relays])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::DistanceSpec;

    fn uniform_seed(spec: &DistanceSpec) -> Option<u64> {
        match spec {
            DistanceSpec::Uniform { seed, .. } => Some(*seed),
            DistanceSpec::Explicit(_) => None,
        }
    }

    const SCENARIO: &str = r#"{"L": 4, "d1": [0.6, 0.65, 0.7, 0.75], "d2": {"min": 0.5, "max": 0.7, "seed": 3},
        "gamma_s_dbm": 25, "sigma2": 1, "eta": 0.9, "alpha": 0.3, "lambda": 0.4}"#;

    fn manifest(kind: &str) -> ExperimentManifest {
        let text = format!(
            r#"{{"experiment": "{kind}", "scenario": {SCENARIO}, "monte_carlo_n": 2000,
                 "seeds": {{"sampling": 5}}, "settings": {{"grid_points": 20}}}}"#
        );
        serde_json::from_str(&text).unwrap()
    }

    #[test]
    fn hash_ignores_output_dir_and_tracks_seed() {
        let a = manifest("cdf_compare");
        let mut b = a.clone();
        b.output_dir = PathBuf::from("elsewhere");
        assert_eq!(a.config_hash().unwrap(), b.config_hash().unwrap());
        b.seeds.sampling = Some(6);
        assert_ne!(a.config_hash().unwrap(), b.config_hash().unwrap());
        assert_eq!(a.config_hash().unwrap().len(), 64);
    }

    #[test]
    fn monte_carlo_needs_a_seed() {
        let mut m = manifest("cdf_compare");
        m.seeds.sampling = None;
        assert!(m
            .violations()
            .iter()
            .any(|v| v.code == "missing_sampling_seed"));
        let mut m = manifest("outage_surface");
        m.seeds.sampling = None;
        assert!(m.violations().is_empty());
    }

    #[test]
    fn unknown_experiment_is_rejected() {
        let text = format!(r#"{{"experiment": "nope", "scenario": {SCENARIO}}}"#);
        assert!(serde_json::from_str::<ExperimentManifest>(&text).is_err());
    }

    #[test]
    fn geometry_seed_replaces_interval_seeds() {
        let mut m = manifest("cdf_compare");
        m.seeds.geometry = Some(77);
        let f = m.scenario_file().unwrap();
        assert_eq!(uniform_seed(&f.d2), Some(77));
        assert_eq!(uniform_seed(&f.d1), None);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::config("x", "y")), EXIT_VALIDATION);
        assert_eq!(exit_code(&Error::domain("f", "m")), EXIT_NUMERICAL);
        let mut buf = Vec::new();
        let code = report_error(&Error::config("ts_factor_at_unity", "alpha = 1"), &mut buf);
        assert_eq!(code, EXIT_VALIDATION);
        let record: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(record["code"], "ts_factor_at_unity");
        assert_eq!(record["error"], "invalid_config");
    }
}
