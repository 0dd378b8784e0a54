//! How each physical parameter shifts the best-relay SNR distribution.
use swipt_evt::ordering::{predict_order, verify_parameter_change, Parameter, Regime};
use swipt_evt::ScenarioConfig;

fn main() -> swipt_evt::Result<()> {
    let d2 = (0..12).map(|i| 0.5 + 0.2 * i as f64 / 11.0).collect();
    let config = ScenarioConfig::with_distances(vec![0.65; 12], d2);
    let regime = Regime::from_snr_db(config.source_snr_db());
    for (parameter, new_value) in [
        (Parameter::SourcePower, 28.0),
        (Parameter::TsFactor, 0.5),
        (Parameter::NoisePower, 2.0),
        (Parameter::PsFactor, 0.6),
        (Parameter::PsFactor, 0.1),
    ] {
        let verdict = verify_parameter_change(&config, parameter, new_value, 1e-9)?;
        let predicted = predict_order(parameter, parameter.get(&config), new_value, regime);
        println!(
            "{:<13} {:>6} -> {:<6} predicted {:<13} observed {:<13}",
            parameter.as_str(),
            parameter.get(&config),
            new_value,
            predicted.as_str(),
            verdict.direction.as_str()
        );
    }
    Ok(())
}
