//! Normalized best-relay SNR approaching the standard Gumbel law as relays are added.
use swipt_evt::evt::{
    auto_normalizing_constants, gumbel_cdf, normalized_max_samples, BetaCriterion,
};
use swipt_evt::exact_stats::EmpiricalCdf;
use swipt_evt::scenario::sample_maxima;
use swipt_evt::{build_links, ScenarioConfig};

fn main() -> swipt_evt::Result<()> {
    for relays in [10, 60, 200] {
        // 60% near ring, 40% far ring
        let d1 = (0..relays)
            .map(|i| if i % 10 < 6 { 0.5 } else { 0.8 })
            .collect();
        let d2 = (0..relays)
            .map(|i| 0.5 + 0.2 * ((i * 7) % relays) as f64 / relays as f64)
            .collect();
        let config = ScenarioConfig::with_distances(d1, d2).with_factors(0.7, 0.4);
        let links = build_links(&config)?;
        let c = auto_normalizing_constants(&links, 8, &BetaCriterion::default())?;
        let maxima = sample_maxima(&links, 100_000, 5)?;
        let z = EmpiricalCdf::new(&normalized_max_samples(&maxima, &c))?;
        let ks = z.ks_statistic(|x| Ok(gumbel_cdf(x)))?;
        println!(
            "L = {relays:>3}  case {:<12} a = {:.4e}  b = {:.4e}  KS = {ks:.4}",
            c.case.as_str(),
            c.a,
            c.b
        );
    }
    Ok(())
}
