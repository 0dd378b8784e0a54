//! Time switching, power splitting and the hybrid protocol over a source-power sweep.
use swipt_evt::optimize::{protocol_comparison, write_protocol_csv, ProtocolOptions};
use swipt_evt::ScenarioConfig;

fn main() -> swipt_evt::Result<()> {
    let d2 = (0..20).map(|i| 0.5 + 0.2 * i as f64 / 19.0).collect();
    let config = ScenarioConfig::with_distances(vec![0.65; 20], d2);
    let sweep: Vec<f64> = (0..=8).map(|i| 5.0 * i as f64).collect();
    let rows = protocol_comparison(&config, &sweep, &ProtocolOptions::default())?;
    write_protocol_csv(&rows, std::io::stdout().lock())
}
