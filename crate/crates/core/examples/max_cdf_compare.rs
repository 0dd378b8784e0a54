//! Exact product CDF, exp(-u) approximation and Monte Carlo for the best relay.
use swipt_evt::evt::approx_max_cdf;
use swipt_evt::exact_stats::{exact_max_cdf, EmpiricalCdf};
use swipt_evt::scenario::sample_maxima;
use swipt_evt::{build_links, ScenarioConfig};

fn main() -> swipt_evt::Result<()> {
    let relays = 15;
    let d2 = (0..relays)
        .map(|i| 0.5 + 0.2 * i as f64 / (relays - 1) as f64)
        .collect();
    let links = build_links(&ScenarioConfig::with_distances(vec![0.65; relays], d2))?;
    let emp = EmpiricalCdf::new(&sample_maxima(&links, 200_000, 1)?)?;
    println!(
        "{:>10} {:>10} {:>10} {:>10}",
        "gamma", "empirical", "exact", "exp(-u)"
    );
    for p in [0.05, 0.25, 0.5, 0.75, 0.95] {
        let g = emp.quantile(p);
        println!(
            "{g:>10.1} {:>10.4} {:>10.4} {:>10.4}",
            emp.eval(g),
            exact_max_cdf(&links, g)?,
            approx_max_cdf(&links, g)
        );
    }
    println!(
        "KS exact   {:.4}",
        emp.ks_statistic(|g| exact_max_cdf(&links, g))?
    );
    println!(
        "KS exp(-u) {:.4}",
        emp.ks_statistic(|g| Ok(approx_max_cdf(&links, g)))?
    );
    Ok(())
}
