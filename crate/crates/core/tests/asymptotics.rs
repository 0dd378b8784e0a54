use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use swipt_evt::evt::{
    approx_max_cdf, auto_normalizing_constants, bin_thetas, gumbel_cdf, normalized_max_samples,
    select_beta, BetaCriterion,
};
use swipt_evt::exact_stats::{exact_max_cdf, EmpiricalCdf};
use swipt_evt::scenario::sample_maxima;
use swipt_evt::{build_links, LinkParams, ScenarioConfig};

fn ring(relays: usize) -> Vec<LinkParams> {
    let d2 = (0..relays)
        .map(|i| 0.5 + 0.2 * ((i * 7) % relays) as f64 / relays as f64)
        .collect();
    build_links(&ScenarioConfig::with_distances(vec![0.65; relays], d2)).unwrap()
}

#[test]
fn iid_maximum_is_gumbel_at_two_hundred_relays() {
    let links = vec![LinkParams::new(0.5, 0.3); 200];
    let c = auto_normalizing_constants(&links, 8, &BetaCriterion::default()).unwrap();
    let z = normalized_max_samples(&sample_maxima(&links, 100_000, 17).unwrap(), &c);
    let ks = EmpiricalCdf::new(&z)
        .unwrap()
        .ks_statistic(|x| Ok(gumbel_cdf(x)))
        .unwrap();
    assert!(ks < 0.03, "{ks}");
}

#[test]
fn approximation_error_shrinks_with_relay_count() {
    let mut previous = f64::INFINITY;
    for relays in [10, 20, 60, 200] {
        let links = ring(relays);
        let emp = EmpiricalCdf::new(&sample_maxima(&links, 20_000, 4).unwrap()).unwrap();
        let mut ks: f64 = 0.0;
        let mut below: f64 = 0.0;
        for i in 1..400 {
            let g = emp.quantile(i as f64 / 400.0);
            let exact = exact_max_cdf(&links, g).unwrap();
            let approx = approx_max_cdf(&links, g);
            ks = ks.max((exact - approx).abs());
            below = below.max(exact - approx);
        }
        if relays == 10 {
            println!("L = 10: exact product exceeds exp(-u) by at most {below:.2e}");
        } else {
            assert!(below <= 1e-3, "L = {relays}: {below}");
        }
        assert!(ks < previous, "L = {relays}: {ks} >= {previous}");
        previous = ks;
    }
}

#[test]
fn centring_constants_grow_slowly() {
    // per-relay increment of b, (b_{2L} − b_L) / (L a_L), should vanish as L grows
    let increments: Vec<f64> = [25, 50, 100, 200, 400]
        .windows(2)
        .map(|w| {
            let c0 = auto_normalizing_constants(&ring(w[0]), 8, &BetaCriterion::default()).unwrap();
            let c1 = auto_normalizing_constants(&ring(w[1]), 8, &BetaCriterion::default()).unwrap();
            (c1.b - c0.b) / c0.a / w[0] as f64
        })
        .collect();
    assert!(increments.windows(2).all(|w| w[1] < w[0]), "{increments:?}");
}

#[test]
fn uniform_rates_fill_the_bins() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let links: Vec<_> = (0..200)
        .map(|_| LinkParams::new(rng.random_range(1.0..3.0), 0.2))
        .collect();
    let binning = bin_thetas(&links, 8).unwrap();
    assert_eq!(binning.counts.iter().sum::<usize>(), 200);
    assert!(binning.bin_values.windows(2).all(|w| w[0] < w[1]));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn beta_ignores_link_order(thetas in prop::collection::vec(0.1f64..5.0, 2..40), seed in any::<u64>()) {
        let links: Vec<_> = thetas.iter().map(|&t| LinkParams::new(t, 0.1)).collect();
        let mut shuffled = links.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for i in (1..shuffled.len()).rev() {
            shuffled.swap(i, rng.random_range(0..=i));
        }
        let a = select_beta(&bin_thetas(&links, 6).unwrap(), &BetaCriterion::default()).unwrap();
        let b = select_beta(&bin_thetas(&shuffled, 6).unwrap(), &BetaCriterion::default()).unwrap();
        prop_assert_eq!(a.count, b.count);
        prop_assert!((a.beta - b.beta).abs() <= 1e-12 * a.beta);
    }
}
