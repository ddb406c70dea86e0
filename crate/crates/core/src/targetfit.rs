//! Fitting a dependence structure so that a sum of given margins matches a
//! target law.
//!
//! The fit matrix has `n` margin columns followed by the negated target
//! quantile grid. Minimizing the row-sum variance drives the sum of the
//! margins towards the target. For scalable families the common scale is
//! recalibrated before every Block RA2 pass so that the sum of the margins
//! has the target's variance.

use alloc::vec::Vec;

use crate::algorithms::{block_ra2, block_ra2_pass, BlockRaConfig, RunResult, StopReason};
use crate::dist::{discretize_quantiles, Distribution, QuantileTable};
use crate::gof::{GofVerdict, Thresholds, DEFAULT_GRID_POINTS};
use crate::matrix::RearrangementMatrix;
use crate::oracle::shuffle_columns;
use crate::rank::argsort;
use crate::rng::seeded;
use crate::stats::sample_variance;
use crate::{Error, Result};

/// The law shared by the margin columns.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum MarginFamily {
    /// `U[-a, a]`, scale `a`.
    UniformSymmetric,
    /// `N(0, sigma^2)`, scale `sigma`.
    Normal,
    /// A fixed quantile table; not rescaled.
    Empirical(QuantileTable),
}

/// `count` identically distributed margins.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MarginSpec {
    /// Margin family.
    pub family: MarginFamily,
    /// Number of margin columns.
    pub count: usize,
}

impl MarginSpec {
    /// `count` margins `U[-a, a]`.
    pub fn uniform(count: usize) -> Self {
        Self { family: MarginFamily::UniformSymmetric, count }
    }

    /// `count` margins `N(0, sigma^2)`.
    pub fn normal(count: usize) -> Self {
        Self { family: MarginFamily::Normal, count }
    }

    fn scalable(&self) -> bool {
        !matches!(self.family, MarginFamily::Empirical(_))
    }

    fn default_scale(&self) -> f64 {
        match self.family {
            MarginFamily::UniformSymmetric => 1.5,
            MarginFamily::Normal => 0.4,
            MarginFamily::Empirical(_) => 1.0,
        }
    }

    /// The margin grid at scale one.
    fn unit_grid(&self, m: usize) -> Result<Vec<f64>> {
        let d = match &self.family {
            MarginFamily::UniformSymmetric => Distribution::symmetric_uniform(),
            MarginFamily::Normal => Distribution::standard_normal(),
            MarginFamily::Empirical(t) => Distribution::Empirical(t.clone()),
        };
        discretize_quantiles(&d, m)
    }

    /// The margin law at scale `scale`.
    pub fn distribution(&self, scale: f64) -> Distribution {
        match &self.family {
            MarginFamily::UniformSymmetric => Distribution::Uniform { lo: -scale, hi: scale },
            MarginFamily::Normal => Distribution::Normal { mean: 0.0, sd: scale },
            MarginFamily::Empirical(t) => Distribution::Empirical(t.clone()),
        }
    }
}

/// Which variance the margin sum is recalibrated to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum VarianceTarget {
    /// Sample variance of the discretized target column. The matrix then
    /// has an exact fixed point.
    #[default]
    Grid,
    /// Variance of the continuous target law. The grid variance is slightly
    /// smaller, so the scale keeps drifting upward by about half the gap per
    /// pass and the fit ends on the pass budget.
    Analytic,
}

/// Arrangement the fit starts from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum FitStart {
    /// Every column in grid order: the margins comonotone, the negated
    /// target column countermonotone to them.
    #[default]
    Sorted,
    /// Every column independently shuffled with the fit seed.
    Shuffled,
}

/// Settings for [`fit_sum_to_target`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FitConfig {
    /// Seed for the starting shuffle and partition sampling.
    pub seed: u64,
    /// Starting arrangement.
    pub start: FitStart,
    /// Partitions per pass; `None` uses the Block RA default.
    pub n_sim: Option<usize>,
    /// Starting scale; `None` means 1.5 for uniforms and 0.4 for normals.
    pub initial_scale: Option<f64>,
    /// Relative tolerance on both the variance and the scale.
    pub tol: f64,
    /// Pass budget.
    pub max_passes: usize,
    /// Grid size of the distance evaluations.
    pub grid_points: usize,
    /// Rescale the margins after every pass.
    pub recalibrate: bool,
    /// Variance used by the recalibration.
    pub variance_target: VarianceTarget,
    /// Thresholds for the verdict; `None` resolves reference values or
    /// simulates `threshold_reps` replicates.
    pub thresholds: Option<Thresholds>,
    /// Replicates when thresholds have to be simulated.
    pub threshold_reps: usize,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            start: FitStart::Sorted,
            n_sim: None,
            initial_scale: None,
            tol: 1e-8,
            max_passes: 2000,
            grid_points: DEFAULT_GRID_POINTS,
            recalibrate: true,
            variance_target: VarianceTarget::Grid,
            thresholds: None,
            threshold_reps: 41,
        }
    }
}

/// How the fitted sum compares with the target.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum FitVerdict {
    /// Both statistics at or below their thresholds.
    Indistinguishable,
    /// Only the KS test passed.
    KsOnly,
    /// Only the W2 test passed.
    W2Only,
    /// Neither test passed.
    Neither,
}

impl From<&GofVerdict> for FitVerdict {
    fn from(v: &GofVerdict) -> Self {
        match (v.ks_ok, v.w2_ok) {
            (true, true) => FitVerdict::Indistinguishable,
            (true, false) => FitVerdict::KsOnly,
            (false, true) => FitVerdict::W2Only,
            (false, false) => FitVerdict::Neither,
        }
    }
}

/// Result of [`fit_sum_to_target`].
#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    /// Final `a` or `sigma` (1 for empirical margins).
    pub fitted_scale: f64,
    /// Margin columns followed by the negated target column.
    pub final_matrix: RearrangementMatrix,
    /// KS distance of the margin sum from the target.
    pub ks: f64,
    /// W2 statistic of the margin sum.
    pub w2: f64,
    /// KS threshold used.
    pub ks_threshold: f64,
    /// W2 threshold used.
    pub w2_threshold: f64,
    /// Summary of the comparison.
    pub verdict: FitVerdict,
    /// Full comparison record.
    pub gof: GofVerdict,
    /// Block RA2 passes run.
    pub iterations: usize,
    /// Row-sum variance of `final_matrix`.
    pub final_variance: f64,
    /// Whether the tolerances were met before the pass budget ran out.
    pub converged: bool,
    /// Scale after each recalibration.
    pub scale_trace: Vec<f64>,
    /// Row-sum variance after each pass.
    pub variance_trace: Vec<f64>,
}

impl FitReport {
    /// Number of margin columns.
    pub fn margin_count(&self) -> usize {
        self.final_matrix.n() - 1
    }

    /// The margin columns alone.
    pub fn margins(&self) -> RearrangementMatrix {
        let cols: Vec<&[f64]> = self.final_matrix.columns().take(self.margin_count()).collect();
        RearrangementMatrix::from_columns(&cols).expect("at least two margin columns")
    }

    /// Row sums of the margin columns, the fitted sample of the sum.
    pub fn margin_sums(&self) -> Vec<f64> {
        margin_sums(&self.final_matrix, self.margin_count())
    }
}

fn margin_sums(x: &RearrangementMatrix, n: usize) -> Vec<f64> {
    let mut s = alloc::vec![0.0; x.m()];
    for col in x.columns().take(n) {
        for (acc, v) in s.iter_mut().zip(col) {
            *acc += v;
        }
    }
    s
}

/// Rewrites every margin column as `unit[rank] * scale`, where `rank` is the
/// entry's position in the unit grid. Ranks are recovered from the current
/// values (at `old_scale`) by binary search, falling back to sorting.
fn rescale_margins(x: &mut RearrangementMatrix, n: usize, unit: &[f64], old_scale: f64, scale: f64) {
    let m = x.m();
    for j in 0..n {
        let col = x.column_mut(j);
        let mut ranks = Vec::with_capacity(m);
        let mut seen = alloc::vec![false; m];
        let mut ok = true;
        for &v in col.iter() {
            let target = v / old_scale;
            let k = unit.partition_point(|&u| u < target);
            let hit = [k.wrapping_sub(1), k, k + 1]
                .into_iter()
                .find(|&c| c < m && unit[c] * old_scale == v && !seen[c]);
            match hit {
                Some(c) => {
                    seen[c] = true;
                    ranks.push(c);
                }
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            let order = argsort(col);
            ranks = alloc::vec![0; m];
            for (r, &i) in order.iter().enumerate() {
                ranks[i] = r;
            }
        }
        for (v, &r) in col.iter_mut().zip(&ranks) {
            *v = unit[r] * scale;
        }
    }
}

/// Fits the dependence among `margins` so their sum approximates `target`.
///
/// Each pass runs one Block RA2 pass and then, when enabled, rescales the
/// margins. Stops when both the row-sum variance and the scale change by
/// less than `config.tol` relative, or after `config.max_passes` passes.
pub fn fit_sum_to_target(
    margins: &MarginSpec,
    target: &Distribution,
    m: usize,
    config: &FitConfig,
) -> Result<FitReport> {
    target.validate()?;
    if margins.count < 1 {
        return Err(Error::InvalidArgument("need at least one margin column"));
    }
    if m < 2 {
        return Err(Error::Degenerate { rows: m, cols: margins.count + 1 });
    }
    if config.recalibrate && !margins.scalable() {
        return Err(Error::InvalidArgument("empirical margins cannot be rescaled"));
    }
    if !(config.tol >= 0.0) || config.max_passes == 0 {
        return Err(Error::InvalidArgument("fit tolerances"));
    }
    let n = margins.count;
    let unit = margins.unit_grid(m)?;
    let mut scale = if margins.scalable() {
        config.initial_scale.unwrap_or_else(|| margins.default_scale())
    } else {
        1.0
    };
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::InvalidArgument("initial scale must be positive"));
    }
    let target_col: Vec<f64> = discretize_quantiles(target, m)?.iter().map(|q| -q).collect();
    let target_var = match config.variance_target {
        VarianceTarget::Grid => sample_variance(&target_col),
        VarianceTarget::Analytic => target.variance(),
    };
    let mut cols: Vec<Vec<f64>> = (0..n).map(|_| unit.iter().map(|u| u * scale).collect()).collect();
    cols.push(target_col);
    let grid = RearrangementMatrix::from_columns(&cols)?;
    let mut x = match config.start {
        FitStart::Sorted => grid,
        FitStart::Shuffled => shuffle_columns(&grid, config.seed),
    };
    let ra = BlockRaConfig { n_sim: config.n_sim, ..BlockRaConfig::with_seed(config.seed) };
    let n_sim = ra.resolved_n_sim(x.n());
    let mut rng = seeded(crate::rng::derive_seed(config.seed, 1));

    let mut var = x.variance();
    let mut passes = 0;
    let mut converged = false;
    let mut scale_trace = Vec::new();
    let mut variance_trace = Vec::new();
    while passes < config.max_passes {
        passes += 1;
        block_ra2_pass(&mut x, n_sim, &mut rng)?;
        let mut c = 1.0;
        if config.recalibrate {
            let v = sample_variance(&margin_sums(&x, n));
            if !(v > 0.0) {
                return Err(Error::InvalidArgument("margin sum has zero variance"));
            }
            c = libm::sqrt(target_var / v);
            let new_scale = scale * c;
            rescale_margins(&mut x, n, &unit, scale, new_scale);
            scale = new_scale;
        }
        let new_var = x.variance();
        scale_trace.push(scale);
        variance_trace.push(new_var);
        let dv = (var - new_var).abs() / var.max(f64::MIN_POSITIVE);
        var = new_var;
        if dv < config.tol && (c - 1.0).abs() < config.tol {
            converged = true;
            break;
        }
    }

    let thresholds = match config.thresholds {
        Some(t) => t,
        None => Thresholds::resolve(target, m, config.threshold_reps, config.seed)?,
    };
    let mut sums = margin_sums(&x, n);
    sums.sort_by(f64::total_cmp);
    let ks = crate::gof::ks_distance_sorted(&sums, target, config.grid_points)?;
    let w2 = crate::gof::w2_distance(&sums, target, config.grid_points)?;
    let gof = GofVerdict::from_distances(ks, w2, &thresholds);
    Ok(FitReport {
        fitted_scale: scale,
        final_variance: var,
        final_matrix: x,
        ks,
        w2,
        ks_threshold: thresholds.ks,
        w2_threshold: thresholds.w2,
        verdict: FitVerdict::from(&gof),
        gof,
        iterations: passes,
        converged,
        scale_trace,
        variance_trace,
    })
}

/// Appends `(n_target - n) / 2` countermonotone pairs to the margin matrix
/// `base`. Each pair is a seeded shuffle `V` of the first column together
/// with its mirror image `-V`, so the pair's row sums vanish and the
/// distribution of the total is unchanged. The mirror column reuses the
/// column's own values, so every appended column has the base margin exactly.
pub fn extend_with_countermonotone_pairs(
    base: &RearrangementMatrix,
    n_target: usize,
    seed: u64,
) -> Result<RearrangementMatrix> {
    let n = base.n();
    if n_target < n {
        return Err(Error::InvalidArgument("target column count below the base"));
    }
    if (n_target - n) % 2 != 0 {
        return Err(Error::InvalidArgument("extension must add an even number of columns"));
    }
    let m = base.m();
    let first = base.column(0);
    let order = argsort(first);
    let sorted: Vec<f64> = order.iter().map(|&i| first[i]).collect();
    let span = sorted[m - 1].abs().max(sorted[0].abs());
    for k in 0..m {
        if (sorted[k] + sorted[m - 1 - k]).abs() > 1e-12 * span {
            return Err(Error::InvalidArgument("base margin is not symmetric about zero"));
        }
    }
    let mut cols: Vec<Vec<f64>> = base.columns().map(|c| c.to_vec()).collect();
    let mut rng = seeded(seed);
    for _ in 0..(n_target - n) / 2 {
        let mut v = first.to_vec();
        rand::seq::SliceRandom::shuffle(v.as_mut_slice(), &mut rng);
        let ranks = crate::rank::argsort(&v);
        let mut w = alloc::vec![0.0; m];
        for (r, &i) in ranks.iter().enumerate() {
            w[i] = sorted[m - 1 - r];
        }
        cols.push(v);
        cols.push(w);
    }
    RearrangementMatrix::from_columns(&cols)
}

/// Result of [`spread_dependence`].
#[derive(Debug, Clone, PartialEq)]
pub struct SpreadResult {
    /// `m x 2` sample of `(P, G)`; the second column is the negated
    /// `-G` column of the working matrix.
    pub copula: RearrangementMatrix,
    /// Row-sum variance of the rearranged three-column matrix.
    pub residual_variance: f64,
    /// The Block RA2 run on the three-column matrix.
    pub run: RunResult,
}

/// Finds a joint sample of `(P, G)` whose difference `P - G` has the spread
/// quantiles `fs`: Block RA2 on the columns `[F_P^-1, -F_G^-1, -F_S^-1]`
/// from a seeded random start. Any scaling of `G` is expected to be folded
/// into `fg`. A positive residual signals that no exact fit was found.
pub fn spread_dependence(
    fp: &[f64],
    fg: &[f64],
    fs: &[f64],
    config: &BlockRaConfig,
) -> Result<SpreadResult> {
    if fg.len() != fp.len() {
        return Err(Error::LengthMismatch { expected: fp.len(), found: fg.len() });
    }
    if fs.len() != fp.len() {
        return Err(Error::LengthMismatch { expected: fp.len(), found: fs.len() });
    }
    let neg = |v: &[f64]| v.iter().map(|x| -x).collect::<Vec<f64>>();
    let x = RearrangementMatrix::from_columns(&[fp.to_vec(), neg(fg), neg(fs)])?;
    let start = shuffle_columns(&x, config.seed);
    let run = block_ra2(&start, config)?;
    let residual_variance = run.final_objective;
    let p = run.final_matrix.column(0).to_vec();
    let g = neg(run.final_matrix.column(1));
    let copula = RearrangementMatrix::from_columns(&[p, g])?;
    Ok(SpreadResult { copula, residual_variance, run })
}

/// Whether the margin columns of a fit still hold `unit * scale` exactly.
pub fn margins_match_grid(report: &FitReport, margins: &MarginSpec) -> Result<bool> {
    let unit = margins.unit_grid(report.final_matrix.m())?;
    let scale = report.fitted_scale;
    Ok(report.final_matrix.columns().take(report.margin_count()).all(|c| {
        let mut s = c.to_vec();
        s.sort_by(f64::total_cmp);
        s.iter().zip(&unit).all(|(v, u)| *v == u * scale)
    }))
}

/// Stop reason of a fit, in Block RA terms.
pub fn fit_stop_reason(report: &FitReport) -> StopReason {
    if report.converged {
        StopReason::NoImprovement
    } else {
        StopReason::MaxIterations
    }
}
