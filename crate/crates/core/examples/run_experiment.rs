//! Runs an experiment manifest from code and prints its summary.
use std::path::Path;

use swipt_evt::cli::{run, ExperimentManifest};

fn main() -> swipt_evt::Result<()> {
    let presets = Path::new(env!("CARGO_MANIFEST_DIR")).join("presets");
    let manifest = ExperimentManifest::load(presets.join("optimize_outage_high.json"))?;
    let out = std::env::temp_dir().join("swipt-evt-example");
    let report = run(&manifest, &out)?;
    println!("config hash {}", report.config_hash);
    for row in &report.summary {
        println!("{:<10} {:<20} {}", row.label, row.metric, row.value);
    }
    Ok(())
}
