//! Spearman correlation and the partition-averaged dependence measure.
//!
//! For a matrix with `n` columns the measure averages the Spearman
//! correlation between the block sums `S_pi` and `S_complement` over all
//! `2^(n-1) - 1` two-block partitions. It equals -1 exactly when every split
//! is countermonotonic, which every variance minimizer satisfies.
//!
//! A block sum that is constant makes the Spearman correlation undefined.
//! Inside the measure such a split is scored -1: a constant vector is
//! countermonotonic to anything, and the countermonotone rearrangement of
//! that split moves nothing.

use alloc::vec::Vec;

use rand::Rng;

use crate::partition::{all_canonical, partition_count, Partition};
use crate::rank::{rank_vector, TieMode};
use crate::rng::seeded;
use crate::stats::{compensated_sum, pearson};
use crate::{Error, RearrangementMatrix, Result};

/// Largest column count accepted by exact mode by default (524287 splits).
pub const DEFAULT_EXACT_CAP: usize = 20;

/// How the measure was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Mode {
    /// Every canonical partition.
    Exact,
    /// Uniformly drawn partitions.
    Sampled,
}

/// The dependence measure together with how it was obtained.
#[derive(Debug, Clone, PartialEq)]
pub struct DependenceReport {
    /// The measure, in `[-1, 1]`.
    pub rho: f64,
    /// Exact or sampled.
    pub mode: Mode,
    /// Number of partition terms averaged (draws, in sampled mode).
    pub partitions_evaluated: u64,
    /// Per-partition Spearman values (exact mode only).
    pub per_partition: Vec<(Partition, f64)>,
    /// The partition with the largest correlation seen, and its value.
    pub worst: Option<(Partition, f64)>,
}

/// Spearman correlation: Pearson correlation of average-tie ranks.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch { expected: x.len(), found: y.len() });
    }
    if x.len() < 2 {
        return Err(Error::InvalidArgument("spearman needs at least two observations"));
    }
    let rx = rank_vector(x, TieMode::Average);
    let ry = rank_vector(y, TieMode::Average);
    pearson(&rx, &ry).ok_or(Error::UndefinedSpearman)
}

/// Spearman correlation between the two block sums of `partition`, with an
/// undefined value (constant block) scored as -1.
pub fn block_spearman(x: &RearrangementMatrix, partition: &Partition) -> Result<f64> {
    let (a, b) = x.partition_sums(partition)?;
    match spearman(&a, &b) {
        Ok(v) => Ok(v),
        Err(Error::UndefinedSpearman) => Ok(-1.0),
        Err(e) => Err(e),
    }
}

fn worst_of(terms: &[(Partition, f64)]) -> Option<(Partition, f64)> {
    terms
        .iter()
        .copied()
        .fold(None, |best: Option<(Partition, f64)>, t| match best {
            Some(b) if b.1 >= t.1 => Some(b),
            _ => Some(t),
        })
}

/// The measure over every canonical partition, with the default column cap.
pub fn multivariate_dependence_exact(x: &RearrangementMatrix) -> Result<DependenceReport> {
    multivariate_dependence_exact_with_cap(x, DEFAULT_EXACT_CAP)
}

/// The measure over every canonical partition.
pub fn multivariate_dependence_exact_with_cap(
    x: &RearrangementMatrix,
    cap: usize,
) -> Result<DependenceReport> {
    let n = x.n();
    if n > cap.min(64) {
        return Err(Error::PartitionCapExceeded { n, cap: cap.min(64) });
    }
    let per_partition = all_canonical(n)
        .map(|p| block_spearman(x, &p).map(|v| (p, v)))
        .collect::<Result<Vec<_>>>()?;
    let rho = compensated_sum(per_partition.iter().map(|t| t.1)) / per_partition.len() as f64;
    Ok(DependenceReport {
        rho: rho.clamp(-1.0, 1.0),
        mode: Mode::Exact,
        partitions_evaluated: partition_count(n),
        worst: worst_of(&per_partition),
        per_partition,
    })
}

/// Draws a nonempty proper column subset from iid fair Bernoulli indicators
/// (rejecting the empty and full sets) and returns its canonical partition.
pub fn bernoulli_partition<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Partition {
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    loop {
        let mask = rng.random::<u64>() & full;
        if mask != 0 && mask != full {
            return Partition::from_mask(mask, n)
                .expect("mask is a nonempty proper subset")
                .canonical();
        }
    }
}

/// Monte-Carlo estimate of the measure from `n_samples` random partitions.
pub fn multivariate_dependence_sampled(
    x: &RearrangementMatrix,
    n_samples: usize,
    seed: u64,
) -> Result<DependenceReport> {
    if n_samples == 0 {
        return Err(Error::InvalidArgument("n_samples must be at least 1"));
    }
    if x.n() > 64 {
        return Err(Error::TooManyColumns(x.n()));
    }
    let mut rng = seeded(seed);
    let mut terms = Vec::with_capacity(n_samples);
    for _ in 0..n_samples {
        let p = bernoulli_partition(x.n(), &mut rng);
        terms.push((p, block_spearman(x, &p)?));
    }
    let rho = compensated_sum(terms.iter().map(|t| t.1)) / n_samples as f64;
    Ok(DependenceReport {
        rho: rho.clamp(-1.0, 1.0),
        mode: Mode::Sampled,
        partitions_evaluated: n_samples as u64,
        worst: worst_of(&terms),
        per_partition: Vec::new(),
    })
}

/// Pearson correlation of the block sums for every canonical partition,
/// computed from the column covariance matrix. `None` marks a split whose
/// block sum has zero variance.
pub fn pearson_partition_correlations(
    x: &RearrangementMatrix,
) -> Result<Vec<(Partition, Option<f64>)>> {
    let n = x.n();
    if n > 64 {
        return Err(Error::TooManyColumns(n));
    }
    let m = x.m();
    let means: Vec<f64> = x.columns().map(crate::stats::mean).collect();
    let mut cov = alloc::vec![0.0; n * n];
    for a in 0..n {
        for b in a..n {
            let ca = x.column(a);
            let cb = x.column(b);
            let s = compensated_sum((0..m).map(|i| (ca[i] - means[a]) * (cb[i] - means[b])));
            let v = s / (m - 1) as f64;
            cov[a * n + b] = v;
            cov[b * n + a] = v;
        }
    }
    let block = |ma: u64, mb: u64| -> f64 {
        let mut s = 0.0;
        for a in (0..n).filter(|a| ma & (1 << a) != 0) {
            for b in (0..n).filter(|b| mb & (1 << b) != 0) {
                s += cov[a * n + b];
            }
        }
        s
    };
    Ok(all_canonical(n)
        .map(|p| {
            let (pi, co) = (p.pi_mask(), p.complement_mask());
            let (vp, vc) = (block(pi, pi), block(co, co));
            let scale = 1e-14 * cov.iter().map(|v| libm::fabs(*v)).fold(0.0, f64::max);
            let r = if vp <= scale || vc <= scale {
                None
            } else {
                Some((block(pi, co) / libm::sqrt(vp * vc)).clamp(-1.0, 1.0))
            };
            (p, r)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::stats::pearson;
    use alloc::vec;

    #[test]
    fn spearman_basic() {
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap(), -1.0);
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap(), 1.0);
        // d = (-3, 0, 0, 3), sum d^2 = 18, 1 - 6*18/(4*15) = -0.8
        let r = spearman(&[1.0, 2.0, 3.0, 4.0], &[4.0, 2.0, 3.0, 1.0]).unwrap();
        assert!((r + 0.8).abs() < 1e-15);
        assert_eq!(spearman(&[1.0, 1.0], &[1.0, 2.0]), Err(Error::UndefinedSpearman));
        assert!(spearman(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn exact_measure_on_fixtures() {
        let b1 = multivariate_dependence_exact(&fixtures::local_minimum_4x4()).unwrap();
        assert!((b1.rho + 1.0).abs() < 1e-9);
        assert_eq!(b1.partitions_evaluated, 7);
        assert_eq!(b1.per_partition.len(), 7);
        let b2 = multivariate_dependence_exact(&fixtures::mixable_4x4()).unwrap();
        assert!((b2.rho + 1.0).abs() < 1e-9);

        let c = multivariate_dependence_exact(&fixtures::ra_fixed_point_4x4()).unwrap();
        assert!((c.rho - (-6.8 / 7.0)).abs() < 1e-12, "{}", c.rho);
        let (worst, value) = c.worst.unwrap();
        assert_eq!(worst, Partition::new(&[0, 1], 4).unwrap());
        assert!((value + 0.8).abs() < 1e-12);
    }

    #[test]
    fn comonotone_pair_is_plus_one() {
        let x = RearrangementMatrix::from_columns(&[vec![1.0, 2.0, 3.0], vec![5.0, 6.0, 9.0]])
            .unwrap();
        let r = multivariate_dependence_exact(&x).unwrap();
        assert_eq!(r.rho, 1.0);
        assert_eq!(r.partitions_evaluated, 1);
    }

    #[test]
    fn cap_is_enforced() {
        let cols: Vec<Vec<f64>> = (0..6).map(|j| vec![j as f64, 1.0, 2.0]).collect();
        let x = RearrangementMatrix::from_columns(&cols).unwrap();
        assert_eq!(
            multivariate_dependence_exact_with_cap(&x, 5),
            Err(Error::PartitionCapExceeded { n: 6, cap: 5 })
        );
    }

    #[test]
    fn sampled_on_local_minimum_is_minus_one() {
        let x = fixtures::local_minimum_4x4();
        for seed in 0..5 {
            let r = multivariate_dependence_sampled(&x, 50, seed).unwrap();
            assert!((r.rho + 1.0).abs() < 1e-12);
            assert_eq!(r.mode, Mode::Sampled);
        }
        assert!(multivariate_dependence_sampled(&x, 0, 1).is_err());
    }

    #[test]
    fn sampled_is_deterministic() {
        let x = fixtures::ra_fixed_point_4x4();
        let a = multivariate_dependence_sampled(&x, 100, 7).unwrap();
        let b = multivariate_dependence_sampled(&x, 100, 7).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn pearson_via_covariance_matches_direct() {
        let x = fixtures::ra_fixed_point_4x4();
        for (p, r) in pearson_partition_correlations(&x).unwrap() {
            let (a, b) = x.partition_sums(&p).unwrap();
            let direct = pearson(&a, &b).unwrap();
            assert!((r.unwrap() - direct).abs() < 1e-10, "{p}");
        }
        let two = RearrangementMatrix::from_columns(&[vec![1.0, 2.0, 3.0], vec![3.0, 2.0, 1.0]])
            .unwrap();
        let r = pearson_partition_correlations(&two).unwrap();
        assert!((r[0].1.unwrap() + 1.0).abs() < 1e-15);
    }

    #[test]
    fn pearson_on_mixable_is_minus_one_or_degenerate() {
        for (p, r) in pearson_partition_correlations(&fixtures::mixable_4x4()).unwrap() {
            if let Some(r) = r {
                assert!((r + 1.0).abs() < 1e-9, "{p}: {r}");
            }
        }
    }
}
