//! Globally adaptive Gauss–Kronrod quadrature (21-point Kronrod / 10-point Gauss pair).
//!
//! Intervals are kept in a max-heap keyed on their error estimate; the worst interval is
//! bisected until the summed error estimate drops below `max(abs_tol, rel_tol * |value|)`
//! or the subdivision budget is exhausted. An infinite upper limit is mapped onto `[0, 1)`
//! with `x = a + t / (1 - t)`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Tolerances and budget for [`adaptive_quad_with`].
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Maximum number of intervals held at once.
    pub max_subdivisions: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-12,
            max_subdivisions: 2000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    /// Estimated absolute error of `value`.
    pub error: f64,
    pub evaluations: usize,
    pub subdivisions: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Integrates `f` over `[a, b]`; `b` may be `f64::INFINITY`.
///
/// Returns the estimate once its error bound is at most `max(abs_tol, rel_tol * |value|)`
/// (never tighter than `100 ε |value|`), and a [`Error::Quadrature`] otherwise.
pub fn adaptive_quad<F>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let opts = QuadOptions {
        abs_tol,
        rel_tol,
        ..QuadOptions::default()
    };
    adaptive_quad_with(f, a, b, &opts).map(|r| r.value)
}

/// Like [`adaptive_quad`] but returns the full diagnostic record.
pub fn adaptive_quad_with<F>(f: F, a: f64, b: f64, opts: &QuadOptions) -> Result<QuadResult>
where
    F: Fn(f64) -> f64,
{
    if a.is_nan() || b.is_nan() || !a.is_finite() {
        return Err(Error::domain(
            "adaptive_quad",
            format!("unsupported integration limits [{a}, {b}]"),
        ));
    }
    if b == f64::INFINITY {
        let g = |t: f64| {
            let s = 1.0 - t;
            f(a + t / s) / (s * s)
        };
        return integrate_finite(&g, 0.0, 1.0, opts);
    }
    if b < a {
        return integrate_finite(&f, b, a, opts).map(|r| QuadResult {
            value: -r.value,
            ..r
        });
    }
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
            subdivisions: 0,
        });
    }
    integrate_finite(&f, a, b, opts)
}

fn integrate_finite<F>(f: &F, a: f64, b: f64, opts: &QuadOptions) -> Result<QuadResult>
where
    F: Fn(f64) -> f64,
{
    let mut evaluations = 0usize;
    let first = kronrod21(f, a, b, &mut evaluations)?;
    let mut heap = BinaryHeap::new();
    heap.push(first);
    let mut value = first.value;
    let mut error = first.error;
    // tolerances tighter than the per-segment roundoff floor cannot be met by bisection
    let target = |v: f64| {
        opts.abs_tol
            .max(opts.rel_tol * v.abs())
            .max(100.0 * f64::EPSILON * v.abs())
    };

    while error > target(value) {
        if heap.len() >= opts.max_subdivisions {
            return Err(Error::Quadrature {
                estimate: value,
                error,
                target: target(value),
                evaluations,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.lo + worst.hi);
        // interval too small to split further in floating point
        if mid <= worst.lo || mid >= worst.hi {
            return Err(Error::Quadrature {
                estimate: value,
                error,
                target: target(value),
                evaluations,
            });
        }
        let left = kronrod21(f, worst.lo, mid, &mut evaluations)?;
        let right = kronrod21(f, mid, worst.hi, &mut evaluations)?;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);

        // resum from scratch now and then; the running totals drift
        if heap.len() % 64 == 0 {
            value = heap.iter().map(|s| s.value).sum();
            error = heap.iter().map(|s| s.error).sum();
        }
    }
    let subdivisions = heap.len();
    let value: f64 = heap.iter().map(|s| s.value).sum();
    let error: f64 = heap.iter().map(|s| s.error).sum();
    Ok(QuadResult {
        value,
        error,
        evaluations,
        subdivisions,
    })
}

fn kronrod21<F>(f: &F, lo: f64, hi: f64, evaluations: &mut usize) -> Result<Segment>
where
    F: Fn(f64) -> f64,
{
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let eval = |x: f64| -> Result<f64> {
        let y = f(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(Error::domain(
                "adaptive_quad",
                format!("integrand is not finite at x = {x}"),
            ))
        }
    };

    let fc = eval(center)?;
    let mut gauss = 0.0;
    let mut kronrod = fc * WGK[10];
    let mut abs_sum = kronrod.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = eval(center - dx)?;
        let f2 = eval(center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        abs_sum += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    *evaluations += 21;

    let mean = 0.5 * kronrod;
    let mut asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let value = kronrod * half;
    let abs_int = abs_sum * half.abs();
    let asc = asc * half.abs();
    let mut err = ((kronrod - gauss) * half).abs();
    if asc != 0.0 && err != 0.0 {
        err = asc * (200.0 * err / asc).powf(1.5).min(1.0);
    }
    if abs_int > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * abs_int);
    }
    Ok(Segment {
        lo,
        hi,
        value,
        error: err,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_on_unit_interval() {
        let v = adaptive_quad(|_| 1.0, 0.0, 1.0, 1e-14, 1e-14).unwrap();
        assert!((v - 1.0).abs() < 1e-14);
    }

    #[test]
    fn exponential_on_half_line() {
        let v = adaptive_quad(|x| (-x).exp(), 0.0, f64::INFINITY, 1e-13, 1e-13).unwrap();
        assert!((v - 1.0).abs() < 1e-12, "{v}");
    }

    #[test]
    fn reversed_limits_flip_sign() {
        let v = adaptive_quad(|x| x * x, 2.0, 0.0, 1e-13, 1e-13).unwrap();
        assert!((v + 8.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn reported_error_respects_target() {
        let opts = QuadOptions {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_subdivisions: 500,
        };
        let r = adaptive_quad_with(|x: f64| x.sqrt(), 0.0, 1.0, &opts).unwrap();
        assert!(r.error <= 1e-10_f64.max(1e-10 * r.value.abs()));
        assert!((r.value - 2.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let opts = QuadOptions {
            abs_tol: 1e-15,
            rel_tol: 0.0,
            max_subdivisions: 4,
        };
        let err = adaptive_quad_with(|x: f64| (1.0 / x).sin(), 1e-6, 1.0, &opts).unwrap_err();
        assert!(matches!(err, Error::Quadrature { .. }));
    }

    #[test]
    fn non_finite_integrand_is_an_error() {
        let err = adaptive_quad(|x: f64| 1.0 / (x - 0.5), 0.0, 1.0, 1e-10, 1e-10).unwrap_err();
        assert!(matches!(err, Error::Domain { .. }));
    }
}
