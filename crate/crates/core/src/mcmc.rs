//! A Metropolis chain over rearrangements.
//!
//! Each step picks a canonical partition uniformly and proposes a new order
//! for the rows of the complement block: block sums are ranked like
//! `Y_i - S_pi[i]` with iid Gumbel `Y_i` of scale `1/r`. As `r` grows the
//! proposal approaches the countermonotone rearrangement, so the chain
//! behaves like a noisy Block RA that can climb out of local minima.
//!
//! The target weight of a state is `1 / f` for the objective `f`, and a
//! proposal is accepted with probability `min(1, f_current / f_proposed)`.
//! The proposal asymmetry is not corrected for. A state with `f <= absorb_tol`
//! absorbs the chain.

use alloc::vec::Vec;

use rand::Rng;
use rand_distr::Open01;

use crate::matrix::ranked_source;
use crate::objective::Objective;
use crate::partition::uniform_canonical;
use crate::rng::seeded;
use crate::stats::sample_variance;
use crate::{Error, RearrangementMatrix, Result};

/// Gumbel sharpness used when none is given: `DEFAULT_R_FACTOR / sd(S_pi)`,
/// with `S_pi` the fixed block sums of the current proposal.
pub const DEFAULT_R_FACTOR: f64 = 5.0;

/// Chain settings.
#[derive(Debug, Clone)]
pub struct McmcConfig {
    /// What the chain minimizes.
    pub objective: Objective,
    /// Gumbel rate `r` (scale `1/r`). `None` uses `5 / sd(S_pi)` for each
    /// proposal, which keeps the proposal sharpness independent of units.
    pub gumbel_r: Option<f64>,
    /// Iterations to run.
    pub n_iter: usize,
    /// Seed of the chain.
    pub seed: u64,
    /// Objective value at or below which the chain stops.
    pub absorb_tol: f64,
}

impl Default for McmcConfig {
    fn default() -> Self {
        Self {
            objective: Objective::Variance,
            gumbel_r: None,
            n_iter: 10_000,
            seed: 0,
            absorb_tol: 1e-14,
        }
    }
}

/// The recorded run of a chain.
#[derive(Debug, Clone)]
pub struct ChainTrace {
    /// Objective of the state after each iteration.
    pub objective_per_iter: Vec<f64>,
    /// Whether each iteration's proposal was accepted.
    pub accepted: Vec<bool>,
    /// Objective of the starting state.
    pub initial_objective: f64,
    /// Smallest objective among visited states.
    pub best_objective: f64,
    /// A state attaining `best_objective`.
    pub best_matrix: RearrangementMatrix,
    /// Iteration (1-based; 0 for the start) at which the chain was absorbed.
    pub absorbed_at: Option<usize>,
}

/// Gumbel variate from a uniform `u` in (0, 1): `-ln(-ln u) / r`.
pub fn gumbel_from_uniform(u: f64, r: f64) -> f64 {
    -libm::log(-libm::log(u)) / r
}

/// A draw from the Gumbel law with density `r e^{-rz} exp(-e^{-rz})`.
pub fn gumbel_sample<R: Rng + ?Sized>(r: f64, rng: &mut R) -> f64 {
    let u: f64 = rng.sample(Open01);
    gumbel_from_uniform(u, r)
}

/// Row order of the proposal: draws `Y_i` and returns the row indices sorted
/// by `w_i = Y_i - s_pi[i]` ascending. The row listed `k`-th receives the
/// `k`-th smallest block sum.
pub fn propose_permutation<R: Rng + ?Sized>(s_pi: &[f64], r: f64, rng: &mut R) -> Vec<usize> {
    let w: Vec<f64> = s_pi.iter().map(|&s| gumbel_sample(r, rng) - s).collect();
    let mut order: Vec<usize> = (0..w.len()).collect();
    order.sort_by(|&a, &b| w[a].total_cmp(&w[b]));
    order
}

/// `min(1, f_current / f_proposed)`.
pub fn acceptance_probability(f_current: f64, f_proposed: f64) -> f64 {
    if f_proposed <= f_current {
        1.0
    } else {
        f_current / f_proposed
    }
}

fn default_r(fixed_sums: &[f64]) -> f64 {
    let sd = libm::sqrt(sample_variance(fixed_sums));
    if sd > 0.0 && sd.is_finite() {
        DEFAULT_R_FACTOR / sd
    } else {
        1e12
    }
}

fn checked(value: f64) -> Result<f64> {
    if value.is_finite() && value >= 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidObjective(value))
    }
}

/// Runs the chain from `x`.
pub fn mcmc_block_ra(x: &RearrangementMatrix, config: &McmcConfig) -> Result<ChainTrace> {
    if let Some(r) = config.gumbel_r {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::InvalidArgument("gumbel_r must be positive and finite"));
        }
    }
    if x.n() > 64 {
        return Err(Error::TooManyColumns(x.n()));
    }
    let n = x.n();
    let mut rng = seeded(config.seed);
    let mut state = x.clone();
    let mut f = checked(config.objective.evaluate(&state.row_sums())?)?;
    let mut trace = ChainTrace {
        objective_per_iter: Vec::with_capacity(config.n_iter),
        accepted: Vec::with_capacity(config.n_iter),
        initial_objective: f,
        best_objective: f,
        best_matrix: state.clone(),
        absorbed_at: None,
    };
    if f <= config.absorb_tol {
        trace.absorbed_at = Some(0);
        return Ok(trace);
    }
    for iter in 1..=config.n_iter {
        let p = uniform_canonical(n, &mut rng);
        let (fixed, moving) = state.partition_sums(&p)?;
        let r = config.gumbel_r.unwrap_or_else(|| default_r(&fixed));
        let order = propose_permutation(&fixed, r, &mut rng);
        let source = ranked_source(&order, &moving);
        let proposed_sums: Vec<f64> =
            fixed.iter().zip(&source).map(|(a, &k)| a + moving[k]).collect();
        let f_new = checked(config.objective.evaluate(&proposed_sums)?)?;
        let accept = f_new <= f || rng.random::<f64>() < acceptance_probability(f, f_new);
        if accept {
            state.permute_block_rows(p.complement_mask(), &source);
            f = f_new;
            if f < trace.best_objective {
                trace.best_objective = f;
                trace.best_matrix = state.clone();
            }
        }
        trace.objective_per_iter.push(f);
        trace.accepted.push(accept);
        if f <= config.absorb_tol {
            trace.absorbed_at = Some(iter);
            break;
        }
    }
    Ok(trace)
}
