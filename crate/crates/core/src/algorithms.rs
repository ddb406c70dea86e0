//! The standard rearrangement algorithm and the two Block RA variants.
//!
//! All three minimize the sample variance of the row sums by repeatedly
//! making one block of columns countermonotonic to the rest. Each step keeps
//! both block variances fixed and lowers their covariance, so the variance
//! never increases and every run terminates.

use alloc::vec::Vec;

use crate::depmeasure::{
    block_spearman, multivariate_dependence_exact_with_cap, multivariate_dependence_sampled,
};
use crate::partition::{partition_count, sample_partitions, Partition};
use crate::rng::{derive_seed, seeded, SeededRng};
use crate::{Error, RearrangementMatrix, Result};

/// Why a run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum StopReason {
    /// The dependence measure reached the stopping threshold.
    DependenceThreshold,
    /// A full sweep or pass did not improve the variance.
    NoImprovement,
    /// The sweep budget ran out.
    MaxIterations,
}

/// Outcome of an RA or Block RA run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    /// The rearranged matrix.
    pub final_matrix: RearrangementMatrix,
    /// Row-sum variance of `final_matrix`.
    pub final_objective: f64,
    /// Sweeps (standard RA), passes (Block RA2) or iterations (Block RA1).
    pub sweeps: usize,
    /// Rearrangements that moved at least one row.
    pub rearrangements_applied: usize,
    /// Why the run stopped.
    pub stop_reason: StopReason,
    /// Variance at the start and after every sweep/pass/iteration.
    pub variance_trace: Vec<f64>,
    /// Last computed dependence measure (Block RA1 only).
    pub final_rho: Option<f64>,
}

/// Settings shared by the RA variants.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BlockRaConfig {
    /// Partitions sampled per step; `None` means `min(512, 2^(n-1) - 1)`.
    pub n_sim: Option<usize>,
    /// Block RA1 stops once the dependence measure is at or below this.
    pub rho_stop: f64,
    /// Block RA2 stops when a pass improves the variance by less than this
    /// fraction of the current variance (absolute floor `1e-15`).
    pub improvement_tol: f64,
    /// Upper bound on sweeps/passes/iterations.
    pub max_sweeps: usize,
    /// Seed of the partition sampling stream.
    pub seed: u64,
    /// Block RA1 recomputes the dependence measure every this many
    /// iterations, and always before stopping.
    pub rho_check_every: usize,
    /// Column count up to which the measure is computed exactly; beyond it a
    /// sampled estimate is used.
    pub exact_cap: usize,
    /// Draws for the sampled estimate when `n > exact_cap`.
    pub sampled_rho_draws: usize,
}

/// Default number of partitions examined per step.
pub const DEFAULT_N_SIM: usize = 512;

/// Absolute floor on the per-pass improvement.
pub const IMPROVEMENT_FLOOR: f64 = 1e-15;

impl Default for BlockRaConfig {
    fn default() -> Self {
        Self {
            n_sim: None,
            rho_stop: -0.9999,
            improvement_tol: 1e-12,
            max_sweeps: 100_000,
            seed: 0,
            rho_check_every: 10,
            exact_cap: crate::depmeasure::DEFAULT_EXACT_CAP,
            sampled_rho_draws: 2048,
        }
    }
}

impl BlockRaConfig {
    /// A default configuration with the given seed.
    pub fn with_seed(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }

    /// The number of partitions per step for `n` columns.
    pub fn resolved_n_sim(&self, n: usize) -> usize {
        let p = partition_count(n).min(usize::MAX as u64) as usize;
        self.n_sim.unwrap_or(DEFAULT_N_SIM).min(p).max(1)
    }

    fn validate(&self) -> Result<()> {
        if self.n_sim == Some(0) {
            return Err(Error::InvalidArgument("n_sim must be at least 1"));
        }
        if !(-1.0..0.0).contains(&self.rho_stop) {
            return Err(Error::InvalidArgument("rho_stop must lie in [-1, 0)"));
        }
        if !(self.improvement_tol >= 0.0) {
            return Err(Error::InvalidArgument("improvement_tol must be non-negative"));
        }
        Ok(())
    }
}

/// The standard RA: cycle through the columns, making each countermonotonic
/// with the sum of the others, until a full sweep moves nothing.
pub fn standard_ra(x: &RearrangementMatrix, config: &BlockRaConfig) -> Result<RunResult> {
    let mut x = x.clone();
    let mut trace = alloc::vec![x.variance()];
    let mut applied = 0;
    let mut sweeps = 0;
    let mut stop = StopReason::MaxIterations;
    while sweeps < config.max_sweeps {
        sweeps += 1;
        let mut changed = false;
        for j in 0..x.n() {
            if x.countermonotone_column(j)? {
                changed = true;
                applied += 1;
            }
        }
        let v = x.variance();
        debug_assert!(v <= trace[trace.len() - 1] * (1.0 + 1e-9) + 1e-15);
        trace.push(v);
        if !changed {
            stop = StopReason::NoImprovement;
            break;
        }
    }
    Ok(finish(x, sweeps, applied, stop, trace, None))
}

fn finish(
    x: RearrangementMatrix,
    sweeps: usize,
    applied: usize,
    stop_reason: StopReason,
    variance_trace: Vec<f64>,
    final_rho: Option<f64>,
) -> RunResult {
    RunResult {
        final_objective: x.variance(),
        final_matrix: x,
        sweeps,
        rearrangements_applied: applied,
        stop_reason,
        variance_trace,
        final_rho,
    }
}

/// Applies the countermonotone rearrangement for each partition in order.
/// Returns how many of them moved rows.
pub fn apply_partitions(x: &mut RearrangementMatrix, partitions: &[Partition]) -> Result<usize> {
    let mut applied = 0;
    for p in partitions {
        if x.countermonotone_rearrange(p)? {
            applied += 1;
        }
    }
    Ok(applied)
}

/// One Block RA2 pass: draw the partitions for this pass and apply them in
/// draw order. Returns the number that moved rows.
pub fn block_ra2_pass(
    x: &mut RearrangementMatrix,
    n_sim: usize,
    rng: &mut SeededRng,
) -> Result<usize> {
    let parts = sample_partitions(x.n(), n_sim, rng)?;
    apply_partitions(x, &parts)
}

/// Block RA2: each pass applies the countermonotone rearrangement for a
/// fresh sample of partitions; stops when a pass fails to improve the
/// variance.
pub fn block_ra2(x: &RearrangementMatrix, config: &BlockRaConfig) -> Result<RunResult> {
    config.validate()?;
    let mut x = x.clone();
    let n_sim = config.resolved_n_sim(x.n());
    let mut rng = seeded(config.seed);
    let mut var = x.variance();
    let mut trace = alloc::vec![var];
    let mut applied = 0;
    let mut passes = 0;
    let mut stop = StopReason::MaxIterations;
    while passes < config.max_sweeps {
        passes += 1;
        applied += block_ra2_pass(&mut x, n_sim, &mut rng)?;
        let new = x.variance();
        debug_assert!(new <= var * (1.0 + 1e-9) + 1e-15, "{var} -> {new}");
        trace.push(new);
        let gain = var - new;
        var = new;
        if gain <= (config.improvement_tol * var).max(IMPROVEMENT_FLOOR) {
            stop = StopReason::NoImprovement;
            break;
        }
    }
    Ok(finish(x, passes, applied, stop, trace, None))
}

fn dependence(x: &RearrangementMatrix, config: &BlockRaConfig, salt: u64) -> Result<f64> {
    if x.n() <= config.exact_cap {
        Ok(multivariate_dependence_exact_with_cap(x, config.exact_cap)?.rho)
    } else {
        let seed = derive_seed(config.seed, salt);
        Ok(multivariate_dependence_sampled(x, config.sampled_rho_draws, seed)?.rho)
    }
}

/// Block RA1: rearrange the complement of the sampled partition with the
/// largest block-sum Spearman correlation, until the dependence measure
/// reaches `rho_stop`.
///
/// When the best sampled partition is already countermonotonic (tied sums
/// can keep its correlation above -1), the next best one that still moves
/// rows is used. If no partition moves rows and the measure is still above
/// the threshold, the matrix is a fixed point and the run stops with
/// [`StopReason::NoImprovement`].
pub fn block_ra1(x: &RearrangementMatrix, config: &BlockRaConfig) -> Result<RunResult> {
    config.validate()?;
    if x.n() > 64 {
        return Err(Error::TooManyColumns(x.n()));
    }
    let mut x = x.clone();
    let n = x.n();
    let n_sim = config.resolved_n_sim(n);
    let covers_all = n_sim as u64 >= partition_count(n);
    let every = config.rho_check_every.max(1);
    let mut rng = seeded(config.seed);
    let mut trace = alloc::vec![x.variance()];
    let mut applied = 0;
    let mut iter = 0;
    let mut rho = dependence(&x, config, 0)?;
    if rho <= config.rho_stop {
        return Ok(finish(x, 0, 0, StopReason::DependenceThreshold, trace, Some(rho)));
    }
    while iter < config.max_sweeps {
        iter += 1;
        let parts = sample_partitions(n, n_sim, &mut rng)?;
        let mut scored = parts
            .into_iter()
            .map(|p| block_spearman(&x, &p).map(|r| (p, r)))
            .collect::<Result<Vec<_>>>()?;
        // largest correlation first, ties by canonical index
        scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.canonical_index().cmp(&b.0.canonical_index())));
        let mut moved = false;
        for (p, _) in &scored {
            if x.countermonotone_rearrange(p)? {
                moved = true;
                applied += 1;
                break;
            }
        }
        let v = x.variance();
        debug_assert!(v <= trace[trace.len() - 1] * (1.0 + 1e-9) + 1e-15);
        trace.push(v);
        if !moved || iter % every == 0 {
            rho = dependence(&x, config, iter as u64)?;
            if rho <= config.rho_stop {
                return Ok(finish(x, iter, applied, StopReason::DependenceThreshold, trace, Some(rho)));
            }
            if !moved && covers_all {
                return Ok(finish(x, iter, applied, StopReason::NoImprovement, trace, Some(rho)));
            }
        }
    }
    rho = dependence(&x, config, iter as u64 + 1)?;
    let stop = if rho <= config.rho_stop {
        StopReason::DependenceThreshold
    } else {
        StopReason::MaxIterations
    };
    Ok(finish(x, iter, applied, stop, trace, Some(rho)))
}
