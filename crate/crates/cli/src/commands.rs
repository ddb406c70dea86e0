//! Verb implementations. Each returns the JSON report body.

use anyhow::{anyhow, bail, Context, Result};
use blockra_core::algorithms::{block_ra1, block_ra2, standard_ra, BlockRaConfig, RunResult};
use blockra_core::depmeasure::{
    multivariate_dependence_exact_with_cap, multivariate_dependence_sampled, DependenceReport,
};
use blockra_core::dist::Distribution;
use blockra_core::gof::{
    asymptotic_ks_threshold, kolmogorov_quantile, replicate_seed, replicate_statistic, verdict,
    Test, ThresholdSource, Thresholds, DEFAULT_GRID_POINTS,
};
use blockra_core::mcmc::{mcmc_block_ra, McmcConfig};
use blockra_core::oracle::{
    brute_force_minimum_with_budget, haus_integer_minimum, make_zero_sum_normal_matrix,
    split_minimum,
};
use blockra_core::stats::median;
use blockra_core::targetfit::{
    extend_with_countermonotone_pairs, fit_sum_to_target, spread_dependence, FitConfig, FitStart,
    MarginSpec, VarianceTarget,
};
use blockra_core::Objective;
use serde_json::{json, Value};

use crate::bench::{run_table, BenchConfig};
use crate::cli::*;
use crate::io;

/// Runs one verb and wraps its result with the version and full config.
pub fn run(command: &Command) -> Result<Value> {
    let result = match command {
        Command::Ra(a) => run_ra(a, Variant::Standard)?,
        Command::Bra1(a) => run_ra(a, Variant::Bra1)?,
        Command::Bra2(a) => run_ra(a, Variant::Bra2)?,
        Command::Mcmc(a) => mcmc(a)?,
        Command::Oracle(a) => oracle(a)?,
        Command::Measure(a) => measure(a)?,
        Command::FitSum(a) => fit_sum(a)?,
        Command::Spread(a) => spread(a)?,
        Command::Gof(a) => gof(a)?,
        Command::Thresholds(a) => thresholds(a)?,
        Command::Bench(a) => bench(a)?,
    };
    Ok(json!({
        "version": crate::VERSION,
        "config": command,
        "result": result,
    }))
}

/// Parses `normal`, `uniform`, `normal:MU,SD` or `uniform:LO,HI`.
pub fn parse_target(s: &str) -> Result<Distribution> {
    let (family, params) = match s.split_once(':') {
        Some((f, p)) => (f, Some(p)),
        None => (s, None),
    };
    let pair = |p: &str| -> Result<(f64, f64)> {
        let (a, b) = p.split_once(',').ok_or_else(|| anyhow!("expected two parameters in {s:?}"))?;
        Ok((a.trim().parse()?, b.trim().parse()?))
    };
    let d = match (family, params) {
        ("normal", None) => Distribution::standard_normal(),
        ("uniform", None) => Distribution::symmetric_uniform(),
        ("normal", Some(p)) => {
            let (mean, sd) = pair(p)?;
            Distribution::Normal { mean, sd }
        }
        ("uniform", Some(p)) => {
            let (lo, hi) = pair(p)?;
            Distribution::Uniform { lo, hi }
        }
        _ => bail!("unknown target {s:?}"),
    };
    d.validate()?;
    Ok(d)
}

#[derive(Clone, Copy)]
enum Variant {
    Standard,
    Bra1,
    Bra2,
}

fn run_json(r: &RunResult) -> Value {
    json!({
        "final_objective": r.final_objective,
        "sweeps": r.sweeps,
        "rearrangements_applied": r.rearrangements_applied,
        "stop_reason": r.stop_reason,
        "final_rho": r.final_rho,
        "variance_trace": r.variance_trace,
    })
}

fn run_ra(a: &RunArgs, variant: Variant) -> Result<Value> {
    let x = io::read_matrix(&a.input)?;
    let cfg = BlockRaConfig {
        n_sim: a.n_sim,
        rho_stop: a.rho_stop,
        improvement_tol: a.tol,
        max_sweeps: a.max_sweeps,
        seed: a.seed,
        ..BlockRaConfig::default()
    };
    let r = match variant {
        Variant::Standard => standard_ra(&x, &cfg)?,
        Variant::Bra1 => block_ra1(&x, &cfg)?,
        Variant::Bra2 => block_ra2(&x, &cfg)?,
    };
    if let Some(p) = &a.matrix_out {
        io::write_matrix(p, &r.final_matrix)?;
    }
    let mut v = run_json(&r);
    v["initial_objective"] = json!(x.variance());
    Ok(v)
}

fn mcmc(a: &McmcArgs) -> Result<Value> {
    let x = io::read_matrix(&a.input)?;
    let cfg = McmcConfig {
        objective: Objective::parse(&a.objective)?,
        gumbel_r: a.gumbel_r,
        n_iter: a.iters,
        seed: a.seed,
        absorb_tol: a.absorb_tol,
    };
    let t = mcmc_block_ra(&x, &cfg)?;
    if let Some(p) = &a.trace_out {
        io::write_trace(p, &t.objective_per_iter, &t.accepted)?;
    }
    if let Some(p) = &a.matrix_out {
        io::write_matrix(p, &t.best_matrix)?;
    }
    let accepted = t.accepted.iter().filter(|&&b| b).count();
    Ok(json!({
        "objective": cfg.objective.label(),
        "initial_objective": t.initial_objective,
        "best_objective": t.best_objective,
        "final_objective": t.objective_per_iter.last().copied().unwrap_or(t.initial_objective),
        "iterations": t.objective_per_iter.len(),
        "accepted": accepted,
        "absorbed_at": t.absorbed_at,
    }))
}

fn oracle(a: &OracleArgs) -> Result<Value> {
    let need = |v: Option<usize>, name: &str| v.ok_or_else(|| anyhow!("--{name} is required"));
    match a.mode {
        OracleMode::Brute => {
            let path = a.input.as_ref().ok_or_else(|| anyhow!("--input is required"))?;
            let x = io::read_matrix(path)?;
            let r = match a.split {
                Some(s) => split_minimum(&x, s, a.max_arrangements)?,
                None => brute_force_minimum_with_budget(&x, a.max_arrangements)?,
            };
            if let Some(p) = &a.matrix_out {
                io::write_matrix(p, &r.argmin_matrix)?;
            }
            Ok(json!({
                "min_variance": r.min_variance,
                "arrangements_scanned": r.arrangements_scanned.to_string(),
                "argmin_matrix": r.argmin_matrix.to_rows(),
            }))
        }
        OracleMode::Haus => {
            let h = haus_integer_minimum(need(a.m, "m")?, need(a.n, "n")?)?;
            Ok(serde_json::to_value(h)?)
        }
        OracleMode::Zerosum => {
            let x = make_zero_sum_normal_matrix(need(a.m, "m")?, need(a.n, "n")?, a.seed)?;
            if let Some(p) = &a.matrix_out {
                io::write_matrix(p, &x)?;
            }
            let worst = x.row_sums().iter().fold(0.0f64, |acc, s| acc.max(s.abs()));
            Ok(json!({
                "min_variance": 0.0,
                "max_abs_row_sum": worst,
                "matrix": x.to_rows(),
            }))
        }
    }
}

fn dependence_json(r: &DependenceReport) -> Value {
    json!({
        "rho": r.rho,
        "mode": r.mode,
        "partitions_evaluated": r.partitions_evaluated,
        "worst_partition": r.worst.as_ref().map(|(p, _)| p.to_string()),
        "worst_value": r.worst.as_ref().map(|(_, v)| *v),
    })
}

fn measure(a: &MeasureArgs) -> Result<Value> {
    let x = io::read_matrix(&a.input)?;
    let r = match a.sampled {
        Some(k) => multivariate_dependence_sampled(&x, k, a.seed)?,
        None => multivariate_dependence_exact_with_cap(&x, a.exact_cap)?,
    };
    Ok(dependence_json(&r))
}

fn resolve_thresholds(
    target: &Distribution,
    m: usize,
    reps: usize,
    seed: u64,
    asymptotic_ks: bool,
    jobs: usize,
) -> Result<Thresholds> {
    if let Some(t) = Thresholds::reference(target, m) {
        return Ok(t);
    }
    let w2 = parallel_median(Test::W2, target, m, reps, seed, jobs)?;
    Ok(if asymptotic_ks {
        Thresholds { ks: asymptotic_ks_threshold(m), w2, source: ThresholdSource::Asymptotic }
    } else {
        let ks = parallel_median(Test::Ks, target, m, reps, seed, jobs)?;
        Thresholds { ks, w2, source: ThresholdSource::Simulated }
    })
}

/// [`blockra_core::gof::median_threshold`] on a pool of `jobs` threads.
/// Replicate streams are fixed by index, so the result equals the
/// sequential one.
pub fn parallel_median(
    test: Test,
    target: &Distribution,
    m: usize,
    reps: usize,
    seed: u64,
    jobs: usize,
) -> Result<f64> {
    use rayon::prelude::*;
    if reps == 0 {
        bail!("need at least one replicate");
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build()?;
    let stats = pool.install(|| {
        (0..reps)
            .into_par_iter()
            .map(|r| replicate_statistic(test, target, m, DEFAULT_GRID_POINTS, replicate_seed(seed, r)))
            .collect::<blockra_core::Result<Vec<f64>>>()
    })?;
    Ok(median(&stats))
}

fn fit_sum(a: &FitArgs) -> Result<Value> {
    let target = parse_target(&a.target)?;
    let margins = match a.margins {
        MarginArg::Uniform => MarginSpec::uniform(a.n),
        MarginArg::Normal => MarginSpec::normal(a.n),
    };
    let thresholds = resolve_thresholds(&target, a.m, a.threshold_reps, a.seed, a.asymptotic_ks, 1)?;
    let cfg = FitConfig {
        seed: a.seed,
        start: match a.start {
            StartArg::Sorted => FitStart::Sorted,
            StartArg::Shuffled => FitStart::Shuffled,
        },
        n_sim: a.n_sim,
        initial_scale: a.initial_scale,
        tol: a.tol,
        max_passes: a.max_passes,
        variance_target: match a.variance_target {
            VarianceArg::Grid => VarianceTarget::Grid,
            VarianceArg::Analytic => VarianceTarget::Analytic,
        },
        thresholds: Some(thresholds),
        threshold_reps: a.threshold_reps,
        ..FitConfig::default()
    };
    let r = fit_sum_to_target(&margins, &target, a.m, &cfg)?;
    let mut joint = r.margins();
    if let Some(n_target) = a.extend_to {
        joint = extend_with_countermonotone_pairs(&joint, n_target, a.seed)?;
    }
    if let Some(p) = &a.emit_joint {
        io::write_matrix(p, &joint)?;
    }
    if let Some(p) = &a.matrix_out {
        io::write_matrix(p, &r.final_matrix)?;
    }
    Ok(json!({
        "fitted_scale": r.fitted_scale,
        "ks": r.ks,
        "w2": r.w2,
        "ks_threshold": r.ks_threshold,
        "w2_threshold": r.w2_threshold,
        "threshold_source": thresholds.source,
        "verdict": r.verdict,
        "gof": r.gof,
        "iterations": r.iterations,
        "converged": r.converged,
        "final_variance": r.final_variance,
        "joint_columns": joint.n(),
        "w2_truncated": target.unbounded(),
    }))
}

fn spread(a: &SpreadArgs) -> Result<Value> {
    let fp = io::read_values(&a.fp)?;
    let fg = io::read_values(&a.fg)?;
    let fs = io::read_values(&a.fs)?;
    let cfg = BlockRaConfig { n_sim: a.n_sim, ..BlockRaConfig::with_seed(a.seed) };
    let r = spread_dependence(&fp, &fg, &fs, &cfg)?;
    if let Some(p) = &a.emit_joint {
        io::write_matrix(p, &r.copula)?;
    }
    Ok(json!({
        "residual_variance": r.residual_variance,
        "m": r.copula.m(),
        "run": run_json(&r.run),
    }))
}

fn gof(a: &GofArgs) -> Result<Value> {
    let target = parse_target(&a.target)?;
    let values = io::read_values(&a.input)?;
    let m = a.m.unwrap_or(values.len());
    let t = resolve_thresholds(&target, m, a.reps, a.seed, a.asymptotic_ks, a.jobs)?;
    let v = if a.grid == DEFAULT_GRID_POINTS {
        verdict(&values, &target, &t)?
    } else {
        let mut s = values.clone();
        s.sort_by(f64::total_cmp);
        let d = blockra_core::gof::ks_distance_sorted(&s, &target, a.grid)?;
        let w = blockra_core::gof::w2_distance(&s, &target, a.grid)?;
        blockra_core::gof::GofVerdict::from_distances(d, w, &t)
    };
    let mut out = serde_json::to_value(v)?;
    out["threshold_source"] = json!(t.source);
    out["m"] = json!(m);
    out["w2_truncated"] = json!(target.unbounded());
    Ok(out)
}

fn thresholds(a: &ThresholdArgs) -> Result<Value> {
    let target = parse_target(&a.target)?;
    let test = match a.test {
        TestArg::Ks => Test::Ks,
        TestArg::W2 => Test::W2,
    };
    let med = parallel_median(test, &target, a.m, a.reps, a.seed, a.jobs)
        .context("threshold simulation")?;
    let mut out = json!({ "median": med, "m": a.m, "reps": a.reps });
    if test == Test::Ks {
        out["asymptotic"] = json!(asymptotic_ks_threshold(a.m));
        out["kolmogorov_median"] = json!(kolmogorov_quantile(0.5));
    }
    Ok(out)
}

fn bench(a: &BenchArgs) -> Result<Value> {
    let cfg = BenchConfig { reps: a.reps, seed: a.seed, band: a.band, ..BenchConfig::default() };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(a.jobs.max(1)).build()?;
    let cells = pool.install(|| run_table(a.table, &a.cells, &cfg))?;
    Ok(json!({ "table": a.table, "cells": cells }))
}
