//! Exponential integrals: dispatch, quadrature cross-check and the asymptotic series.
use swipt_evt::special_fn::{
    exp_integral, exp_integral_asymptotic, exp_integral_eval, exp_integral_quadrature,
};

fn main() -> swipt_evt::Result<()> {
    for (n, x) in [
        (0, 2.0),
        (1, 1.0),
        (5, 0.0),
        (3, 0.01),
        (12, 4.0),
        (40, 30.0),
    ] {
        let e = exp_integral_eval(n, x)?;
        let q = exp_integral_quadrature(n, x)?;
        println!(
            "E_{n}({x}) = {:.15e}  [{:?}]  quadrature {:.15e}",
            e.value, e.method, q
        );
    }
    let exact = exp_integral(1, 50.0)?;
    for terms in 1..=4 {
        let approx = exp_integral_asymptotic(1, 50.0, terms);
        println!(
            "asymptotic E_1(50), {terms} terms: relative error {:.2e}",
            (approx - exact).abs() / exact
        );
    }
    Ok(())
}
