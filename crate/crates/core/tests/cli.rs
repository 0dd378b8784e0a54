use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use swipt_evt::cli::{read_summary, run, ExperimentKind, ExperimentManifest};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_swipt-evt"))
}

fn preset(name: &str) -> PathBuf {
    [env!("CARGO_MANIFEST_DIR"), "presets", name]
        .iter()
        .collect()
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn codes(report: &serde_json::Value) -> Vec<String> {
    report["violations"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v["code"].as_str().unwrap().to_string())
        .collect()
}

fn write_scenario(dir: &Path, alpha: f64, d1: &str) -> PathBuf {
    let path = dir.join("scenario.json");
    fs::write(
        &path,
        format!(
            r#"{{ "L": 2, "d1": {d1}, "d2": [0.6, 0.6], "gamma_s_dbm": 25, "sigma2": 1,
                 "eta": 0.9, "alpha": {alpha}, "lambda": 0.4 }}"#
        ),
    )
    .unwrap();
    path
}

#[test]
fn list_experiments_names_every_kind() {
    let out = bin().arg("list-experiments").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for kind in ExperimentKind::ALL {
        assert!(text.contains(kind.as_str()), "{} missing", kind.as_str());
    }
}

#[test]
fn every_preset_validates() {
    for entry in fs::read_dir(preset(""))
        .unwrap()
        .chain(fs::read_dir(preset("scenarios")).unwrap())
    {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "json") {
            let out = bin()
                .args(["validate", "--config"])
                .arg(&path)
                .output()
                .unwrap();
            assert!(
                out.status.success(),
                "{}: {}",
                path.display(),
                String::from_utf8_lossy(&out.stdout)
            );
            assert_eq!(stdout_json(&out)["valid"], true);
        }
    }
}

#[test]
fn validate_names_the_violated_invariants() {
    let dir = tempfile::tempdir().unwrap();
    let unity = write_scenario(dir.path(), 1.0, "[0.6, 0.6]");
    let out = bin()
        .args(["validate", "--config"])
        .arg(&unity)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(codes(&stdout_json(&out)), ["ts_factor_at_unity"]);

    let negative = write_scenario(dir.path(), 1.0, "[-0.6, 0.6]");
    let out = bin()
        .args(["validate", "--config"])
        .arg(&negative)
        .output()
        .unwrap();
    let found = codes(&stdout_json(&out));
    assert!(
        found.contains(&"nonpositive_distance".to_string()),
        "{found:?}"
    );
    assert!(
        found.contains(&"ts_factor_at_unity".to_string()),
        "{found:?}"
    );
}

#[test]
fn unknown_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(
        &path,
        r#"{ "L": 1, "d1": [0.6], "d2": [0.6], "gamma_s_dbm": 25, "sigma2": 1, "eta": 0.9,
             "alpha": 0.3, "lambda": 0.4, "shadowing": 3 }"#,
    )
    .unwrap();
    let out = bin()
        .args(["validate", "--config"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let record: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert!(record["message"].as_str().unwrap().contains("shadowing"));
}

#[test]
fn run_writes_headers_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["run", "--config"])
        .arg(preset("optimize_outage_low.json"))
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    for name in ["result.csv", "trace.csv", "summary.csv"] {
        let text = fs::read_to_string(dir.path().join(name)).unwrap();
        let header = text.lines().next().unwrap();
        assert!(
            header.starts_with("# config_hash=") && header.contains(" seed="),
            "{header}"
        );
        assert!(!text.contains('\r'));
    }
    let rows = read_summary(dir.path().join("summary.csv")).unwrap();
    let lambda = rows.iter().find(|r| r.metric == "lambda_star").unwrap();
    assert_eq!(lambda.value, 0.0);
}

#[test]
fn monte_carlo_runs_are_byte_identical() {
    let mut manifest = ExperimentManifest::load(preset("cdf_compare.json")).unwrap();
    manifest.monte_carlo_n = 5_000;
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let ra = run(&manifest, a.path()).unwrap();
    let rb = run(&manifest, b.path()).unwrap();
    assert_eq!(ra.files.len(), rb.files.len());
    for (fa, fb) in ra.files.iter().zip(&rb.files) {
        assert_eq!(
            fs::read(fa).unwrap(),
            fs::read(fb).unwrap(),
            "{}",
            fa.display()
        );
    }
    assert_eq!(
        read_summary(a.path().join("summary.csv")).unwrap(),
        ra.summary
    );
}

#[test]
fn seed_override_changes_hash_and_samples() {
    let dir = tempfile::tempdir().unwrap();
    let run_with = |seed: &str, sub: &str| {
        let out = bin()
            .args(["run", "--config"])
            .arg(preset("iid_pitfall.json"))
            .args(["--mc-samples", "2000", "--seed-override", seed, "--out"])
            .arg(dir.path().join(sub))
            .output()
            .unwrap();
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        fs::read_to_string(dir.path().join(sub).join("summary.csv")).unwrap()
    };
    let a = run_with("1", "a");
    let b = run_with("2", "b");
    assert_ne!(a.lines().next(), b.lines().next());
    assert!(a.contains("seed=1") && b.contains("seed=2"));
}

#[test]
fn failures_produce_structured_records() {
    let out = bin()
        .args(["run", "--config", "/nonexistent/manifest.json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let record: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert!(record["error"].is_string());
}
