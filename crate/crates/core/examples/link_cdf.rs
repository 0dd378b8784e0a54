//! Per-link CDF of the end-to-end SNR: series against integral form, and against sampling.
use swipt_evt::exact_stats::{link_cdf_quadrature, link_cdf_series, EmpiricalCdf, SERIES_TOL};
use swipt_evt::scenario::sample_link;
use swipt_evt::LinkParams;

fn main() -> swipt_evt::Result<()> {
    let link = LinkParams::new(0.8, 2.5);
    for gamma in [0.1, 0.5, 1.0, 2.0, 5.0] {
        let s = link_cdf_series(link.theta, link.nu, gamma, SERIES_TOL)?;
        let q = link_cdf_quadrature(link.theta, link.nu, gamma)?;
        println!(
            "F({gamma:>4}) series {:.12} ({} terms, {:?})  integral {:.12}",
            s.value, s.terms, s.method, q.value
        );
    }
    let samples = sample_link(&link, 0, 200_000, 11);
    let emp = EmpiricalCdf::new(&samples)?;
    let ks =
        emp.ks_statistic(|g| link_cdf_series(link.theta, link.nu, g, SERIES_TOL).map(|e| e.value))?;
    println!("KS against 200000 samples: {ks:.5}");
    Ok(())
}
