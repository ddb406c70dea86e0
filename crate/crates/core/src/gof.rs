//! Goodness-of-fit distances, simulated median thresholds and verdicts.
//!
//! `D_m` is the Kolmogorov-Smirnov sup-distance between the empirical cdf of
//! a sample and the target cdf, `T_m` the squared L2-Wasserstein distance
//! between their quantile functions. A sample is judged indistinguishable
//! from the target when both statistics sit at or below the median that iid
//! samples of the same size would produce.

use alloc::vec::Vec;

use crate::dist::Distribution;
use crate::rng::{derive_seed, seeded};
use crate::{Error, Result};

/// Grid size used for both distances unless stated otherwise.
pub const DEFAULT_GRID_POINTS: usize = 50_000;

/// Sample size the reference thresholds belong to.
pub const REFERENCE_M: usize = 1_000_000;
/// Median KS distance at `m = 10^6` (distribution free).
pub const REFERENCE_KS: f64 = 8.2e-4;
/// Median W2 statistic at `m = 10^6` for `N(0,1)`.
pub const REFERENCE_W2_NORMAL: f64 = 3.5e-6;
/// Median W2 statistic at `m = 10^6` for `U[-1,1]`.
pub const REFERENCE_W2_UNIFORM: f64 = 4.7e-7;

/// Alias kept for callers that think of the law as a fit target.
pub type TargetDistribution = Distribution;

/// The two statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Test {
    /// Kolmogorov-Smirnov sup-distance.
    Ks,
    /// Squared L2-Wasserstein distance.
    W2,
}

fn sorted_copy(values: &[f64]) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::InvalidArgument("empty sample"));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let mut s = values.to_vec();
    s.sort_by(f64::total_cmp);
    Ok(s)
}

fn check_grid(grid_points: usize) -> Result<()> {
    if grid_points < 2 {
        return Err(Error::InvalidArgument("grid needs at least two points"));
    }
    Ok(())
}

/// KS distance of an unsorted sample from `target`.
pub fn ks_distance(values: &[f64], target: &Distribution, grid_points: usize) -> Result<f64> {
    ks_distance_sorted(&sorted_copy(values)?, target, grid_points)
}

/// KS distance of an ascending sample.
///
/// Both one-sided gaps are taken at every step of the empirical cdf, then
/// `grid_points` target quantiles at `(k + 1/2)/grid` are checked as well.
pub fn ks_distance_sorted(sorted: &[f64], target: &Distribution, grid_points: usize) -> Result<f64> {
    check_grid(grid_points)?;
    if sorted.is_empty() {
        return Err(Error::InvalidArgument("empty sample"));
    }
    let m = sorted.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let v = sorted[i];
        let mut j = i;
        while j + 1 < sorted.len() && sorted[j + 1] == v {
            j += 1;
        }
        let f = target.cdf(v);
        d = d.max((f - i as f64 / m).abs()).max(((j + 1) as f64 / m - f).abs());
        i = j + 1;
    }
    for k in 0..grid_points {
        let x = target.quantile((k as f64 + 0.5) / grid_points as f64);
        let g = sorted.partition_point(|&s| s <= x) as f64 / m;
        d = d.max((g - target.cdf(x)).abs());
    }
    Ok(d.min(1.0))
}

/// Squared L2-Wasserstein distance of an ascending sample from `target`.
///
/// Midpoint rule on `grid_points` nodes `u_k = (k + 1/2)/grid`; the sample
/// quantile is the order statistic `sorted[ceil(u m) - 1]`. For unbounded
/// targets this truncates the integral to `[1/(2 grid), 1 - 1/(2 grid)]`.
pub fn w2_distance(sorted: &[f64], target: &Distribution, grid_points: usize) -> Result<f64> {
    check_grid(grid_points)?;
    if sorted.is_empty() {
        return Err(Error::InvalidArgument("empty sample"));
    }
    if sorted.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidArgument("sample must be sorted ascending"));
    }
    let m = sorted.len();
    let g = grid_points as f64;
    let total = crate::stats::compensated_sum((0..grid_points).map(|k| {
        let u = (k as f64 + 0.5) / g;
        let idx = (libm::ceil(u * m as f64) as usize).clamp(1, m) - 1;
        let diff = sorted[idx] - target.quantile(u);
        diff * diff
    }));
    Ok(total / g)
}

/// Either statistic of an ascending sample.
pub fn statistic(test: Test, sorted: &[f64], target: &Distribution, grid_points: usize) -> Result<f64> {
    match test {
        Test::Ks => ks_distance_sorted(sorted, target, grid_points),
        Test::W2 => w2_distance(sorted, target, grid_points),
    }
}

/// The statistic of one iid sample of size `m` drawn from `target` with the
/// given stream seed.
pub fn replicate_statistic(
    test: Test,
    target: &Distribution,
    m: usize,
    grid_points: usize,
    seed: u64,
) -> Result<f64> {
    target.validate()?;
    if m == 0 {
        return Err(Error::InvalidArgument("sample size must be positive"));
    }
    let mut rng = seeded(seed);
    let mut sample: Vec<f64> = (0..m).map(|_| target.sample(&mut rng)).collect();
    sample.sort_by(f64::total_cmp);
    statistic(test, &sample, target, grid_points)
}

/// Seed of replicate `r` under base seed `seed`.
pub fn replicate_seed(seed: u64, r: usize) -> u64 {
    derive_seed(seed, r as u64)
}

/// Median of `n_replicates` simulated statistics. Replicate `r` uses the
/// stream [`replicate_seed`]`(seed, r)`, so parallel drivers reproduce the
/// sequential result.
pub fn median_threshold(
    test: Test,
    target: &Distribution,
    m: usize,
    n_replicates: usize,
    seed: u64,
) -> Result<f64> {
    if n_replicates == 0 {
        return Err(Error::InvalidArgument("need at least one replicate"));
    }
    let stats = (0..n_replicates)
        .map(|r| replicate_statistic(test, target, m, DEFAULT_GRID_POINTS, replicate_seed(seed, r)))
        .collect::<Result<Vec<_>>>()?;
    Ok(crate::stats::median(&stats))
}

/// Limit law of `sqrt(m) D_m`:
/// `H(t) = 1 - 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 t^2)`.
///
/// Below `t = 1` the equivalent theta-function form
/// `sqrt(2 pi)/t sum_{k>=1} exp(-(2k-1)^2 pi^2 / (8 t^2))` is summed instead,
/// since the alternating series converges slowly there.
pub fn kolmogorov_asymptotic_cdf(t: f64) -> f64 {
    if !(t > 0.0) {
        return 0.0;
    }
    if t.is_infinite() {
        return 1.0;
    }
    let h = if t < 1.0 {
        let c = core::f64::consts::PI * core::f64::consts::PI / (8.0 * t * t);
        let mut s = 0.0;
        for k in 1..200u32 {
            let odd = (2 * k - 1) as f64;
            let term = libm::exp(-odd * odd * c);
            s += term;
            if term < 1e-16 {
                break;
            }
        }
        libm::sqrt(2.0 * core::f64::consts::PI) / t * s
    } else {
        let mut s = 0.0;
        for k in 1..200u32 {
            let kf = k as f64;
            let term = libm::exp(-2.0 * kf * kf * t * t);
            s += if k % 2 == 1 { term } else { -term };
            if term < 1e-16 {
                break;
            }
        }
        1.0 - 2.0 * s
    };
    h.clamp(0.0, 1.0)
}

/// Inverse of [`kolmogorov_asymptotic_cdf`] by bisection.
pub fn kolmogorov_quantile(p: f64) -> f64 {
    let (mut lo, mut hi) = (1e-3, 10.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if kolmogorov_asymptotic_cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Where a pair of thresholds came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum ThresholdSource {
    /// Tabulated medians for `m = 10^6`, KS optionally rescaled by `sqrt`.
    Reference,
    /// Direct simulation.
    Simulated,
    /// KS from the Kolmogorov limit, W2 simulated.
    Asymptotic,
}

/// Median thresholds for both statistics.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Thresholds {
    /// KS threshold.
    pub ks: f64,
    /// W2 threshold.
    pub w2: f64,
    /// Provenance of the pair.
    pub source: ThresholdSource,
}

impl Thresholds {
    /// Tabulated values at `m = 10^6` for `N(0,1)` and `U[-1,1]`; `None` for
    /// other targets or sizes.
    pub fn reference(target: &Distribution, m: usize) -> Option<Self> {
        if m != REFERENCE_M {
            return None;
        }
        let w2 = match *target {
            Distribution::Normal { mean, sd } if mean == 0.0 && sd == 1.0 => REFERENCE_W2_NORMAL,
            Distribution::Uniform { lo, hi } if lo == -1.0 && hi == 1.0 => REFERENCE_W2_UNIFORM,
            _ => return None,
        };
        Some(Self { ks: REFERENCE_KS, w2, source: ThresholdSource::Reference })
    }

    /// Simulated medians of both statistics.
    pub fn simulate(target: &Distribution, m: usize, n_replicates: usize, seed: u64) -> Result<Self> {
        Ok(Self {
            ks: median_threshold(Test::Ks, target, m, n_replicates, seed)?,
            w2: median_threshold(Test::W2, target, m, n_replicates, seed)?,
            source: ThresholdSource::Simulated,
        })
    }

    /// Reference values when available, otherwise simulation.
    pub fn resolve(target: &Distribution, m: usize, n_replicates: usize, seed: u64) -> Result<Self> {
        match Self::reference(target, m) {
            Some(t) => Ok(t),
            None => Self::simulate(target, m, n_replicates, seed),
        }
    }
}

/// Asymptotic KS median `H^{-1}(1/2)/sqrt(m)`.
pub fn asymptotic_ks_threshold(m: usize) -> f64 {
    kolmogorov_quantile(0.5) / libm::sqrt(m as f64)
}

/// Distances compared against thresholds.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GofVerdict {
    /// KS distance.
    pub d_ks: f64,
    /// W2 statistic.
    pub t_w2: f64,
    /// KS threshold.
    pub med_ks: f64,
    /// W2 threshold.
    pub med_w2: f64,
    /// `d_ks <= med_ks`.
    pub ks_ok: bool,
    /// `t_w2 <= med_w2`.
    pub w2_ok: bool,
    /// Both tests passed.
    pub both_ok: bool,
}

impl GofVerdict {
    /// Assembles a verdict from precomputed distances.
    pub fn from_distances(d_ks: f64, t_w2: f64, thresholds: &Thresholds) -> Self {
        let ks_ok = d_ks <= thresholds.ks;
        let w2_ok = t_w2 <= thresholds.w2;
        Self {
            d_ks,
            t_w2,
            med_ks: thresholds.ks,
            med_w2: thresholds.w2,
            ks_ok,
            w2_ok,
            both_ok: ks_ok && w2_ok,
        }
    }
}

/// Computes both distances for `values` on the default grid and compares.
pub fn verdict(values: &[f64], target: &Distribution, thresholds: &Thresholds) -> Result<GofVerdict> {
    let sorted = sorted_copy(values)?;
    let d = ks_distance_sorted(&sorted, target, DEFAULT_GRID_POINTS)?;
    let t = w2_distance(&sorted, target, DEFAULT_GRID_POINTS)?;
    Ok(GofVerdict::from_distances(d, t, thresholds))
}
