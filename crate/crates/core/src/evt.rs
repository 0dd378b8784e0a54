//! Asymptotic law of the best relay's SNR.
//!
//! For large `L` the maximum behaves like `exp(−u(γ))` with
//! `u(γ) = Σ_ℓ exp(−θ_ℓ γ − ν_ℓ)`, and after an affine normalization
//! `(max − b_L) / a_L` it converges to the standard Gumbel law. The constants depend
//! on which hop is identically distributed across relays:
//!
//! | case             | `a_L`  | `b_L`                                  |
//! |------------------|--------|----------------------------------------|
//! | `all_iid`        | `1/θ`  | `(ln L − ν) / θ`                       |
//! | `first_hop_iid`  | `1/θ`  | `ln Σ_ℓ e^{−ν_ℓ} / θ`                  |
//! | `second_hop_iid` | `1/β`  | `(ln R_β − ν) / β`                     |
//! | `fully_inid`     | `1/β`  | `ln Σ_{ℓ ∈ β-bin} e^{−ν_ℓ} / β`        |
//!
//! `β` is the smallest first-hop rate whose population grows with `L`. At finite `L`
//! "grows with `L`" has no sharp meaning, so [`select_beta`] applies a two-threshold
//! surrogate and reports how confident the choice is.

use serde::{Deserialize, Serialize};

use crate::compensated::Neumaier;
use crate::error::{Error, Result};
use crate::exact_stats::{CdfCurve, Provenance};
use crate::scenario::LinkParams;

/// Which hop is identically distributed across relays.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Case {
    AllIid,
    FirstHopIid,
    SecondHopIid,
    FullyInid,
}

impl Case {
    pub fn as_str(self) -> &'static str {
        match self {
            Case::AllIid => "all_iid",
            Case::FirstHopIid => "first_hop_iid",
            Case::SecondHopIid => "second_hop_iid",
            Case::FullyInid => "fully_inid",
        }
    }

    fn needs_binning(self) -> bool {
        matches!(self, Case::SecondHopIid | Case::FullyInid)
    }
}

fn all_close(values: impl Iterator<Item = f64> + Clone, tol: f64) -> bool {
    let mut it = values.clone();
    let Some(first) = it.next() else {
        return true;
    };
    values
        .into_iter()
        .all(|v| v == first || (v - first).abs() <= tol * v.abs().max(first.abs()))
}

/// Classifies links by whether all `θ` (relative tolerance `theta_tol`) and all `ν`
/// (relative tolerance `nu_tol`) coincide.
pub fn classify_case(links: &[LinkParams], theta_tol: f64, nu_tol: f64) -> Case {
    let same_theta = all_close(links.iter().map(|l| l.theta), theta_tol);
    let same_nu = all_close(links.iter().map(|l| l.nu), nu_tol);
    match (same_theta, same_nu) {
        (true, true) => Case::AllIid,
        (true, false) => Case::FirstHopIid,
        (false, true) => Case::SecondHopIid,
        (false, false) => Case::FullyInid,
    }
}

/// Uniform-width quantization of the first-hop rates. Only nonempty bins are kept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaBinning {
    /// `(lower, upper)` edge of every kept bin.
    pub bin_edges: Vec<(f64, f64)>,
    /// Representative rate of each bin: the mean `θ` of its members.
    pub bin_values: Vec<f64>,
    pub counts: Vec<usize>,
    /// `assignment[ℓ]` is the kept-bin index of link `ℓ`.
    pub assignment: Vec<usize>,
}

impl ThetaBinning {
    pub fn num_bins(&self) -> usize {
        self.bin_values.len()
    }

    pub fn members(&self, bin: usize) -> impl Iterator<Item = usize> + '_ {
        self.assignment
            .iter()
            .enumerate()
            .filter(move |(_, &b)| b == bin)
            .map(|(i, _)| i)
    }
}

/// Splits `[min θ, max θ]` into `num_bins` equal-width bins.
pub fn bin_thetas(links: &[LinkParams], num_bins: usize) -> Result<ThetaBinning> {
    if links.is_empty() {
        return Err(Error::domain("bin_thetas", "no links"));
    }
    if num_bins == 0 {
        return Err(Error::domain("bin_thetas", "need at least one bin"));
    }
    let lo = links.iter().map(|l| l.theta).fold(f64::INFINITY, f64::min);
    let hi = links
        .iter()
        .map(|l| l.theta)
        .fold(f64::NEG_INFINITY, f64::max);
    let width = (hi - lo) / num_bins as f64;
    let raw_bin = |theta: f64| -> usize {
        if width == 0.0 {
            0
        } else {
            (((theta - lo) / width).floor() as usize).min(num_bins - 1)
        }
    };

    let mut counts = vec![0usize; num_bins];
    let mut sums = vec![Neumaier::default(); num_bins];
    for l in links {
        let b = raw_bin(l.theta);
        counts[b] += 1;
        sums[b].add(l.theta);
    }
    let mut remap = vec![usize::MAX; num_bins];
    let mut binning = ThetaBinning {
        bin_edges: Vec::new(),
        bin_values: Vec::new(),
        counts: Vec::new(),
        assignment: Vec::with_capacity(links.len()),
    };
    for b in 0..num_bins {
        if counts[b] == 0 {
            continue;
        }
        remap[b] = binning.counts.len();
        let lower = lo + width * b as f64;
        let upper = if b + 1 == num_bins {
            hi
        } else {
            lo + width * (b + 1) as f64
        };
        binning.bin_edges.push((lower, upper));
        binning.bin_values.push(sums[b].value() / counts[b] as f64);
        binning.counts.push(counts[b]);
    }
    binning
        .assignment
        .extend(links.iter().map(|l| remap[raw_bin(l.theta)]));
    Ok(binning)
}

/// Thresholds of the finite-`L` surrogate used by [`select_beta`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaCriterion {
    /// A candidate bin must hold at least `count_fraction · L` links.
    pub count_fraction: f64,
    /// Every faster bin `j` must satisfy `R_j · R_β^{−θ_j/β} ≤ tail_bound`.
    pub tail_bound: f64,
}

impl Default for BetaCriterion {
    fn default() -> Self {
        Self {
            count_fraction: 0.05,
            tail_bound: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BetaStatus {
    /// The smallest-rate bin passed both tests.
    Smallest,
    /// A larger-rate bin was accepted after smaller ones failed; worth a second look.
    SkippedSmaller,
    /// No bin passed; the most populated bin (smallest rate on ties) was taken.
    Fallback,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaSelection {
    pub beta: f64,
    pub count: usize,
    pub bin: usize,
    pub status: BetaStatus,
}

/// Picks the dominant first-hop rate `β` and its population `R_β`.
pub fn select_beta(binning: &ThetaBinning, criterion: &BetaCriterion) -> Result<BetaSelection> {
    let n = binning.num_bins();
    if n == 0 {
        return Err(Error::domain("select_beta", "empty binning"));
    }
    let total: usize = binning.counts.iter().sum();
    for i in 0..n {
        let beta = binning.bin_values[i];
        let r = binning.counts[i] as f64;
        if r < criterion.count_fraction * total as f64 {
            continue;
        }
        let tail_ok = (i + 1..n).all(|j| {
            let exponent = -binning.bin_values[j] / beta;
            binning.counts[j] as f64 * r.powf(exponent) <= criterion.tail_bound
        });
        if tail_ok {
            return Ok(BetaSelection {
                beta,
                count: binning.counts[i],
                bin: i,
                status: if i == 0 {
                    BetaStatus::Smallest
                } else {
                    BetaStatus::SkippedSmaller
                },
            });
        }
    }
    let max_count = *binning.counts.iter().max().expect("nonempty");
    let bin = binning
        .counts
        .iter()
        .position(|&c| c == max_count)
        .expect("max exists");
    Ok(BetaSelection {
        beta: binning.bin_values[bin],
        count: max_count,
        bin,
        status: BetaStatus::Fallback,
    })
}

/// Affine constants that map the maximum onto the standard Gumbel law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalizingConstants {
    pub a: f64,
    pub b: f64,
    pub beta: Option<f64>,
    pub case: Case,
    pub beta_status: Option<BetaStatus>,
}

/// `ln Σ e^{−v}`, shifted by the smallest `v`.
fn log_sum_exp_neg(values: &[f64]) -> f64 {
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    if min.is_infinite() {
        return f64::NEG_INFINITY;
    }
    let mut acc = Neumaier::default();
    for &v in values {
        acc.add((min - v).exp());
    }
    -min + acc.value().ln()
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let mut acc = Neumaier::default();
    let mut n = 0usize;
    for v in values {
        acc.add(v);
        n += 1;
    }
    acc.value() / n as f64
}

/// Normalizing constants for `links` under `case`.
///
/// The identical-hop cases use the mean of that hop's parameters (they coincide up to the
/// classification tolerance). The two cases with unequal first hops need `binning`.
pub fn normalizing_constants(
    links: &[LinkParams],
    case: Case,
    binning: Option<&ThetaBinning>,
    criterion: &BetaCriterion,
) -> Result<NormalizingConstants> {
    if links.is_empty() {
        return Err(Error::domain("normalizing_constants", "no links"));
    }
    let num = links.len() as f64;
    if !case.needs_binning() {
        let theta = mean(links.iter().map(|l| l.theta));
        let b = match case {
            Case::AllIid => (num.ln() - mean(links.iter().map(|l| l.nu))) / theta,
            _ => log_sum_exp_neg(&links.iter().map(|l| l.nu).collect::<Vec<_>>()) / theta,
        };
        return Ok(NormalizingConstants {
            a: 1.0 / theta,
            b,
            beta: None,
            case,
            beta_status: None,
        });
    }
    let binning = binning.ok_or_else(|| {
        Error::domain(
            "normalizing_constants",
            format!("case {} requires a theta binning", case.as_str()),
        )
    })?;
    if binning.assignment.len() != links.len() {
        return Err(Error::domain(
            "normalizing_constants",
            "binning does not match the link list",
        ));
    }
    let sel = select_beta(binning, criterion)?;
    if sel.count == 0 {
        return Err(Error::domain("normalizing_constants", "empty beta bin"));
    }
    let beta = sel.beta;
    let b = match case {
        Case::SecondHopIid => ((sel.count as f64).ln() - mean(links.iter().map(|l| l.nu))) / beta,
        _ => {
            let nus: Vec<f64> = binning.members(sel.bin).map(|i| links[i].nu).collect();
            log_sum_exp_neg(&nus) / beta
        }
    };
    Ok(NormalizingConstants {
        a: 1.0 / beta,
        b,
        beta: Some(beta),
        case,
        beta_status: Some(sel.status),
    })
}

/// Classifies, bins (when needed) and normalizes in one call.
pub fn auto_normalizing_constants(
    links: &[LinkParams],
    num_bins: usize,
    criterion: &BetaCriterion,
) -> Result<NormalizingConstants> {
    let case = classify_case(links, 1e-9, 1e-9);
    let binning = if case.needs_binning() {
        Some(bin_thetas(links, num_bins)?)
    } else {
        None
    };
    normalizing_constants(links, case, binning.as_ref(), criterion)
}

/// `u(γ) = Σ_ℓ exp(−θ_ℓ γ − ν_ℓ)`, compensated.
pub fn u_of_gamma(links: &[LinkParams], gamma: f64) -> f64 {
    let mut acc = Neumaier::default();
    for l in links {
        acc.add((-l.theta * gamma - l.nu).exp());
    }
    acc.value()
}

/// `γ ↦ −u'(γ) = Σ_ℓ θ_ℓ exp(−θ_ℓ γ − ν_ℓ)`.
pub fn u_slope(links: &[LinkParams], gamma: f64) -> f64 {
    let mut acc = Neumaier::default();
    for l in links {
        acc.add(l.theta * (-l.theta * gamma - l.nu).exp());
    }
    acc.value()
}

/// Approximate CDF of the maximum, `exp(−u(γ))`.
pub fn approx_max_cdf(links: &[LinkParams], gamma: f64) -> f64 {
    (-u_of_gamma(links, gamma)).exp()
}

/// Density of [`approx_max_cdf`].
pub fn approx_max_pdf(links: &[LinkParams], gamma: f64) -> f64 {
    (-u_of_gamma(links, gamma)).exp() * u_slope(links, gamma)
}

pub fn approx_max_curve(links: &[LinkParams], grid: &[f64]) -> Result<CdfCurve> {
    CdfCurve::from_fn(grid, Provenance::EvtApprox, |g| {
        Ok(approx_max_cdf(links, g))
    })
}

/// `(x − b) / a` for every sample.
pub fn normalized_max_samples(samples: &[f64], constants: &NormalizingConstants) -> Vec<f64> {
    samples
        .iter()
        .map(|&x| (x - constants.b) / constants.a)
        .collect()
}

/// The standard Gumbel law `exp(−exp(−z))`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GumbelLaw;

impl GumbelLaw {
    pub fn cdf(&self, z: f64) -> f64 {
        gumbel_cdf(z)
    }

    pub fn pdf(&self, z: f64) -> f64 {
        gumbel_pdf(z)
    }

    pub fn quantile(&self, p: f64) -> f64 {
        -(-p.ln()).ln()
    }

    pub fn median(&self) -> f64 {
        self.quantile(0.5)
    }
}

pub fn gumbel_cdf(z: f64) -> f64 {
    (-(-z).exp()).exp()
}

pub fn gumbel_pdf(z: f64) -> f64 {
    let t = (-z).exp();
    if t.is_infinite() {
        return 0.0;
    }
    t * (-t).exp()
}
