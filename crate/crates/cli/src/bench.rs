//! Table benchmarks at desk scale.
//!
//! Each replicate draws a start matrix, runs the standard RA on it (`V_ra`)
//! and then Block RA2 on the RA output (`V_bra`). Replicates use
//! `derive_seed(seed, r)` streams and are merged by index, so the result
//! does not depend on the worker count.

use anyhow::{bail, Result};
use blockra_core::algorithms::{block_ra2, standard_ra, BlockRaConfig};
use blockra_core::oracle::{
    arrangement_count, brute_force_minimum_with_budget, make_zero_sum_normal_matrix, shuffle_columns,
    split_minimum, uniform_start, DEFAULT_BUDGET,
};
use blockra_core::rng::derive_seed;
use blockra_core::RearrangementMatrix;
use rayon::prelude::*;
use serde::Serialize;

/// Which table to regenerate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Table {
    /// Mean `V_ra` and `V_bra` from uniform starts.
    Tcomp,
    /// Mean gap to the exhaustive minimum, `n = 4`.
    T1b,
    /// Mean variance from shuffled zero-sum normal matrices, `m = 10`.
    T3b,
}

/// One `(m, n)` cell with its reference means.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Cell {
    /// Rows.
    pub m: usize,
    /// Columns.
    pub n: usize,
    /// Reference mean for the standard RA.
    pub reference_ra: f64,
    /// Reference mean for Block RA2.
    pub reference_bra: f64,
}

const fn cell(m: usize, n: usize, reference_ra: f64, reference_bra: f64) -> Cell {
    Cell { m, n, reference_ra, reference_bra }
}

/// Reference cells of each table.
pub fn reference_cells(table: Table) -> Vec<Cell> {
    match table {
        Table::Tcomp => vec![
            cell(10, 4, 0.001, 0.0006),
            cell(10, 7, 0.0004, 1.1e-5),
            cell(10, 10, 0.00018, 1.8e-7),
            cell(100, 4, 1.2e-5, 5.5e-6),
            cell(100, 7, 3.4e-6, 8e-8),
            cell(100, 10, 1.6e-6, 1.3e-9),
            cell(1000, 4, 1.2e-7, 5.5e-8),
            cell(1000, 7, 3.2e-8, 7.6e-10),
            cell(1000, 10, 1.6e-8, 1.2e-11),
        ],
        Table::T1b => vec![
            cell(4, 4, 0.0020, 0.0001),
            cell(5, 4, 0.0015, 0.0002),
            cell(6, 4, 0.0026, 0.0003),
            cell(7, 4, 0.0015, 0.0003),
        ],
        Table::T3b => vec![
            cell(10, 4, 0.02, 0.005),
            cell(10, 5, 0.001, 0.0009),
            cell(10, 6, 0.007, 0.0003),
            cell(10, 7, 0.005, 0.0001),
            cell(10, 8, 0.004, 0.00009),
        ],
    }
}

/// Mean and standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    /// Sample mean.
    pub mean: f64,
    /// Standard error of the mean.
    pub se: f64,
}

fn summarize(v: &[f64]) -> Summary {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = if v.len() > 1 {
        v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    Summary { mean, se: (var / n).sqrt() }
}

/// Result of one cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellReport {
    /// The cell and its reference means.
    pub cell: Cell,
    /// Replicates run.
    pub reps: usize,
    /// `V_ra`, or `V_ra - V*` for T1b.
    pub ra: Summary,
    /// `V_bra`, or `V_bra - V*` for T1b.
    pub bra: Summary,
    /// Mean exhaustive minimum (T1b only).
    pub v_star: Option<Summary>,
    /// `ra.mean / reference_ra`.
    pub ratio_ra: f64,
    /// `bra.mean / reference_bra`.
    pub ratio_bra: f64,
    /// Both ratios within `[1/band, band]`.
    pub within_band: bool,
    /// `bra.mean < ra.mean`.
    pub bra_better: bool,
}

/// Replicate counts and seeding.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BenchConfig {
    /// Replicates per cell.
    pub reps: usize,
    /// Base seed.
    pub seed: u64,
    /// Multiplicative tolerance on the reference means.
    pub band: f64,
    /// Arrangement budget of the T1b oracle.
    pub oracle_budget: u128,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self { reps: 200, seed: 0, band: 3.0, oracle_budget: DEFAULT_BUDGET }
    }
}

fn start_matrix(table: Table, m: usize, n: usize, seed: u64) -> Result<RearrangementMatrix> {
    Ok(match table {
        Table::Tcomp | Table::T1b => uniform_start(m, n, seed)?,
        Table::T3b => shuffle_columns(&make_zero_sum_normal_matrix(m, n, seed)?, derive_seed(seed, 1)),
    })
}

/// Arrangements [`exhaustive_minimum`] scans for an `m x n` matrix: a
/// two-block split for `n >= 4`, the column odometer otherwise.
pub fn oracle_cost(m: usize, n: usize) -> u128 {
    if n >= 4 {
        let split = n / 2;
        arrangement_count(m, split - 1).saturating_mul(arrangement_count(m, n - split - 1))
    } else {
        arrangement_count(m, n.saturating_sub(2))
    }
}

/// Exhaustive minimum of the row-sum variance.
pub fn exhaustive_minimum(x: &RearrangementMatrix, budget: u128) -> Result<f64> {
    let (m, n) = (x.m(), x.n());
    if oracle_cost(m, n) > budget {
        bail!("oracle budget {budget} too small for a {m}x{n} matrix");
    }
    Ok(if n >= 4 {
        split_minimum(x, n / 2, budget)?.min_variance
    } else {
        brute_force_minimum_with_budget(x, budget)?.min_variance
    })
}

/// One replicate: `(V_ra, V_bra, V*)`.
pub fn replicate(table: Table, m: usize, n: usize, seed: u64, budget: u128) -> Result<(f64, f64, Option<f64>)> {
    let x = start_matrix(table, m, n, seed)?;
    let ra_cfg = BlockRaConfig::with_seed(seed);
    let ra = standard_ra(&x, &ra_cfg)?;
    // Tcomp and T1b refine the RA output; T3b runs both from the shuffled start
    let bra_start = match table {
        Table::T3b => &x,
        _ => &ra.final_matrix,
    };
    let bra = block_ra2(bra_start, &BlockRaConfig::with_seed(derive_seed(seed, 2)))?;
    let v_star = match table {
        Table::T1b => Some(exhaustive_minimum(&x, budget)?),
        _ => None,
    };
    Ok((ra.final_objective, bra.final_objective, v_star))
}

/// Runs every replicate of one cell on the current rayon pool.
pub fn run_cell(table: Table, cell: Cell, config: &BenchConfig) -> Result<CellReport> {
    if config.reps == 0 {
        bail!("need at least one replicate");
    }
    if table == Table::T1b && oracle_cost(cell.m, cell.n) > config.oracle_budget {
        bail!("t1b cell m={} n={} exceeds the oracle budget", cell.m, cell.n);
    }
    let cell_seed = derive_seed(config.seed, ((cell.m as u64) << 16) | cell.n as u64);
    let runs = (0..config.reps)
        .into_par_iter()
        .map(|r| replicate(table, cell.m, cell.n, derive_seed(cell_seed, r as u64), config.oracle_budget))
        .collect::<Result<Vec<_>>>()?;
    let (mut ra, mut bra, mut star) = (Vec::new(), Vec::new(), Vec::new());
    for (a, b, s) in runs {
        match s {
            Some(v) => {
                ra.push(a - v);
                bra.push(b - v);
                star.push(v);
            }
            None => {
                ra.push(a);
                bra.push(b);
            }
        }
    }
    let ra = summarize(&ra);
    let bra = summarize(&bra);
    let ratio_ra = ra.mean / cell.reference_ra;
    let ratio_bra = bra.mean / cell.reference_bra;
    let inside = |r: f64| r >= 1.0 / config.band && r <= config.band;
    Ok(CellReport {
        cell,
        reps: config.reps,
        v_star: (!star.is_empty()).then(|| summarize(&star)),
        ratio_ra,
        ratio_bra,
        within_band: inside(ratio_ra) && inside(ratio_bra),
        bra_better: bra.mean < ra.mean,
        ra,
        bra,
    })
}

/// Runs the given cells (all reference cells when `cells` is empty).
pub fn run_table(table: Table, cells: &[(usize, usize)], config: &BenchConfig) -> Result<Vec<CellReport>> {
    let all = reference_cells(table);
    let chosen: Vec<Cell> = if cells.is_empty() {
        all
    } else {
        cells
            .iter()
            .map(|&(m, n)| {
                all.iter()
                    .copied()
                    .find(|c| c.m == m && c.n == n)
                    .ok_or_else(|| anyhow::anyhow!("no reference cell m={m} n={n}"))
            })
            .collect::<Result<_>>()?
    };
    chosen.into_iter().map(|c| run_cell(table, c, config)).collect()
}
