//! Ergodic capacity, throughput and outage of the best relay.
use swipt_evt::metrics::{ergodic_capacity_eval, CapacityReport};
use swipt_evt::scenario::{db_to_linear, sample_maxima};
use swipt_evt::{build_links, ScenarioConfig};

fn main() -> swipt_evt::Result<()> {
    let gamma_th = db_to_linear(15.0);
    for relays in [10, 20, 40] {
        let d2 = (0..relays)
            .map(|i| 0.5 + 0.2 * i as f64 / (relays - 1) as f64)
            .collect();
        let config = ScenarioConfig::with_distances(vec![0.65; relays], d2);
        let links = build_links(&config)?;
        let report = CapacityReport::compute(&links, config.ts_factor, gamma_th)?;
        let c = ergodic_capacity_eval(&links)?;
        let maxima = sample_maxima(&links, 100_000, 9)?;
        let mc = maxima.iter().map(|x| 0.5 * (1.0 + x).log2()).sum::<f64>() / maxima.len() as f64;
        println!(
            "L = {relays:>2}  C = {:.4} (tail form {:.4}, MC {mc:.4})  R = {:.4}  P_out = {:.3e}",
            report.ergodic_capacity, c.tail_form, report.throughput, report.outage_probability
        );
    }
    Ok(())
}
