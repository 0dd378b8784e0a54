//! Turns a scenario file into per-link exponential rates.
use swipt_evt::build_links;
use swipt_evt::scenario::{ScenarioFile, DEFAULT_PATH_LOSS_EXPONENT};

fn main() -> swipt_evt::Result<()> {
    let file = ScenarioFile::from_json(
        r#"{ "L": 6, "d1": { "min": 0.5, "max": 0.8, "seed": 3 },
             "d2": { "min": 0.5, "max": 0.7, "seed": 3 },
             "gamma_s_dbm": 25, "sigma2": 1, "eta": 0.9, "alpha": 0.3, "lambda": 0.4 }"#,
    )?;
    let config = file.resolve()?;
    println!(
        "path-loss exponent {DEFAULT_PATH_LOSS_EXPONENT}, source SNR {:.1} dB",
        config.source_snr_db()
    );
    println!(
        "{:>5} {:>8} {:>8} {:>12} {:>10}",
        "link", "d1", "d2", "theta", "nu"
    );
    for (l, link) in build_links(&config)?.iter().enumerate() {
        println!(
            "{:>5} {:>8.4} {:>8.4} {:>12.4e} {:>10.4}",
            l, config.d1[l], config.d2[l], link.theta, link.nu
        );
    }
    Ok(())
}
