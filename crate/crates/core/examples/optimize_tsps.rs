//! Choosing the time-switching and power-splitting factors.
use swipt_evt::optimize::{
    maximize_ergodic, maximize_throughput, minimize_outage, minimize_outage_with, step_grid,
    OutageOptions, WarmStart,
};
use swipt_evt::scenario::db_to_linear;
use swipt_evt::ScenarioConfig;

fn main() -> swipt_evt::Result<()> {
    let d2 = (0..20).map(|i| 0.5 + 0.2 * i as f64 / 19.0).collect();
    let config = ScenarioConfig::with_distances(vec![0.65; 20], d2);
    let gamma_th = db_to_linear(15.0);
    for dbm in [4.0, 40.0] {
        let r = minimize_outage(&config.with_source_snr_dbm(dbm), gamma_th, 0.9, 0.9)?;
        println!(
            "outage at {dbm} dBm: alpha* = {}, lambda* = {:.4}, P_out = {:.3e}, {} evaluations",
            r.alpha_star,
            r.lambda_star,
            r.outage_probability().unwrap_or(f64::NAN),
            r.evaluations
        );
    }
    let low = config.with_source_snr_dbm(4.0);
    let cold = minimize_outage_with(
        &low,
        gamma_th,
        &OutageOptions {
            warm_start: WarmStart::At(0.9),
            ..Default::default()
        },
    )?;
    println!(
        "same search started at lambda = 0.9: {} evaluations",
        cold.evaluations
    );

    let grid = step_grid(0.9, 0.1);
    let e = maximize_ergodic(&config, 0.9, &grid)?;
    println!(
        "ergodic: alpha* = {}, lambda* = {}, C = {:.4}",
        e.alpha_star, e.lambda_star, e.objective_value
    );
    let t = maximize_throughput(&config, &grid, &grid)?;
    println!(
        "throughput: alpha* = {}, lambda* = {}, R = {:.4}",
        t.alpha_star, t.lambda_star, t.objective_value
    );
    Ok(())
}
