//! Target and margin distributions: cdf, quantile, moments and sampling.

use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Open01, StandardNormal};

use crate::{Error, Result};

const SQRT_2: f64 = core::f64::consts::SQRT_2;
const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

/// Standard normal cdf.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / SQRT_2)
}

/// Standard normal density.
pub fn normal_pdf(x: f64) -> f64 {
    libm::exp(-0.5 * x * x) / SQRT_2PI
}

/// Standard normal quantile.
///
/// A rational approximation (relative error below `1.2e-9`) followed by one
/// Halley step against the `erfc`-based cdf, which brings the result to
/// near machine precision on `(0, 1)`.
pub fn normal_quantile(p: f64) -> f64 {
    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    const P_LOW: f64 = 0.02425;
    let tail = |q: f64| {
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    let x = if p < P_LOW {
        tail(libm::sqrt(-2.0 * libm::log(p)))
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        -tail(libm::sqrt(-2.0 * libm::log1p(-p)))
    };
    // Halley refinement
    let e = normal_cdf(x) - p;
    let u = e * SQRT_2PI * libm::exp(0.5 * x * x);
    x - u / (1.0 + 0.5 * x * u)
}

/// A piecewise-linear quantile function through `(prob, value)` knots.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct QuantileTable {
    probs: Vec<f64>,
    values: Vec<f64>,
}

impl QuantileTable {
    /// Knots must have strictly increasing probabilities in `(0, 1)` and
    /// non-decreasing finite values.
    pub fn new(probs: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if probs.len() != values.len() {
            return Err(Error::LengthMismatch { expected: probs.len(), found: values.len() });
        }
        if probs.len() < 2 {
            return Err(Error::InvalidArgument("quantile table needs two knots"));
        }
        if probs.iter().any(|&p| !(p > 0.0 && p < 1.0)) || values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("quantile table knots out of domain"));
        }
        if probs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument("table probabilities must increase strictly"));
        }
        if values.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidArgument("table values must be non-decreasing"));
        }
        Ok(Self { probs, values })
    }

    /// A table from `m` values placed at the plotting positions `i/(m+1)`.
    /// The values are sorted first.
    pub fn from_plotting_positions(mut values: Vec<f64>) -> Result<Self> {
        values.sort_by(f64::total_cmp);
        let m = values.len();
        let probs = (1..=m).map(|i| i as f64 / (m + 1) as f64).collect();
        Self::new(probs, values)
    }

    /// Knot probabilities.
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Knot values.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn quantile(&self, p: f64) -> f64 {
        let k = self.probs.partition_point(|&q| q < p);
        if k == 0 {
            return self.values[0];
        }
        if k == self.probs.len() {
            return self.values[k - 1];
        }
        let (p0, p1) = (self.probs[k - 1], self.probs[k]);
        let (v0, v1) = (self.values[k - 1], self.values[k]);
        v0 + (v1 - v0) * (p - p0) / (p1 - p0)
    }

    fn cdf(&self, x: f64) -> f64 {
        let n = self.values.len();
        if x < self.values[0] {
            return 0.0;
        }
        if x >= self.values[n - 1] {
            return 1.0;
        }
        let k = self.values.partition_point(|&v| v <= x);
        let (v0, v1) = (self.values[k - 1], self.values[k]);
        let (p0, p1) = (self.probs[k - 1], self.probs[k]);
        p0 + (p1 - p0) * (x - v0) / (v1 - v0)
    }
}

/// A univariate law with cdf and quantile evaluators.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "family", rename_all = "lowercase"))]
pub enum Distribution {
    /// Normal with mean and standard deviation.
    Normal {
        /// Mean.
        mean: f64,
        /// Standard deviation, positive.
        sd: f64,
    },
    /// Uniform on `[lo, hi]`.
    Uniform {
        /// Lower end.
        lo: f64,
        /// Upper end, above `lo`.
        hi: f64,
    },
    /// Piecewise-linear quantile table. Mass outside the knot range is
    /// placed at the end knots.
    Empirical(QuantileTable),
}

impl Distribution {
    /// `N(0, 1)`.
    pub fn standard_normal() -> Self {
        Distribution::Normal { mean: 0.0, sd: 1.0 }
    }

    /// `U[-1, 1]`.
    pub fn symmetric_uniform() -> Self {
        Distribution::Uniform { lo: -1.0, hi: 1.0 }
    }

    /// Checks the parameters.
    pub fn validate(&self) -> Result<()> {
        match *self {
            Distribution::Normal { mean, sd } if mean.is_finite() && sd > 0.0 && sd.is_finite() => {
                Ok(())
            }
            Distribution::Uniform { lo, hi } if lo.is_finite() && hi.is_finite() && hi > lo => {
                Ok(())
            }
            Distribution::Empirical(_) => Ok(()),
            _ => Err(Error::InvalidArgument("distribution parameters")),
        }
    }

    /// Cumulative distribution function.
    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            Distribution::Normal { mean, sd } => normal_cdf((x - mean) / sd),
            Distribution::Uniform { lo, hi } => ((x - lo) / (hi - lo)).clamp(0.0, 1.0),
            Distribution::Empirical(t) => t.cdf(x),
        }
    }

    /// Quantile function on `(0, 1)`.
    pub fn quantile(&self, p: f64) -> f64 {
        match self {
            Distribution::Normal { mean, sd } => mean + sd * normal_quantile(p),
            Distribution::Uniform { lo, hi } => lo + (hi - lo) * p,
            Distribution::Empirical(t) => t.quantile(p),
        }
    }

    /// Mean.
    pub fn mean(&self) -> f64 {
        match self {
            Distribution::Normal { mean, .. } => *mean,
            Distribution::Uniform { lo, hi } => 0.5 * (lo + hi),
            Distribution::Empirical(_) => self.numeric_moments().0,
        }
    }

    /// Variance (numeric, on a 50,000-node midpoint grid, for tables).
    pub fn variance(&self) -> f64 {
        match self {
            Distribution::Normal { sd, .. } => sd * sd,
            Distribution::Uniform { lo, hi } => (hi - lo) * (hi - lo) / 12.0,
            Distribution::Empirical(_) => self.numeric_moments().1,
        }
    }

    fn numeric_moments(&self) -> (f64, f64) {
        let g = 50_000;
        let q: Vec<f64> = (0..g).map(|k| self.quantile((k as f64 + 0.5) / g as f64)).collect();
        let mu = crate::stats::mean(&q);
        let var = crate::stats::compensated_sum(q.iter().map(|v| (v - mu) * (v - mu))) / g as f64;
        (mu, var)
    }

    /// Whether the support is unbounded (normal tails).
    pub fn unbounded(&self) -> bool {
        matches!(self, Distribution::Normal { .. })
    }

    /// The centre and half-width used to build a mirror-symmetric grid, when
    /// the law is symmetric.
    fn symmetry(&self) -> Option<(f64, f64)> {
        match *self {
            Distribution::Normal { mean, sd } => Some((mean, sd)),
            Distribution::Uniform { lo, hi } => Some((0.5 * (lo + hi), 0.5 * (hi - lo))),
            Distribution::Empirical(_) => None,
        }
    }

    /// One draw.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Distribution::Normal { mean, sd } => {
                let z: f64 = rng.sample(StandardNormal);
                mean + sd * z
            }
            Distribution::Uniform { lo, hi } => lo + (hi - lo) * rng.random::<f64>(),
            Distribution::Empirical(t) => {
                let u: f64 = rng.sample(Open01);
                t.quantile(u)
            }
        }
    }
}

fn standard_symmetric(dist: &Distribution, p: f64) -> f64 {
    match dist {
        Distribution::Normal { .. } => normal_quantile(p),
        _ => 2.0 * p - 1.0,
    }
}

/// The quantile grid `F^{-1}(i/(m+1))`, `i = 1..=m`, ascending.
///
/// Symmetric laws get an exactly mirror-symmetric grid: the lower half is
/// evaluated and reflected, so `q[m-1-i] - c == -(q[i] - c)` bit for bit when
/// the centre `c` is zero.
pub fn discretize_quantiles(dist: &Distribution, m: usize) -> Result<Vec<f64>> {
    dist.validate()?;
    if m == 0 {
        return Err(Error::InvalidArgument("grid needs at least one point"));
    }
    let denom = (m + 1) as f64;
    let grid = match dist.symmetry() {
        Some((centre, half)) => {
            let mut z = alloc::vec![0.0; m];
            for i in 0..m / 2 {
                let v = standard_symmetric(dist, (i + 1) as f64 / denom);
                z[i] = v;
                z[m - 1 - i] = -v;
            }
            z.into_iter().map(|v| centre + half * v).collect()
        }
        None => (1..=m).map(|i| dist.quantile(i as f64 / denom)).collect(),
    };
    Ok(grid)
}
