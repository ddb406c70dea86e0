//! Exact global minima for small instances and constructed benchmark
//! matrices with a known optimum.
//!
//! Two exhaustive scans are provided. [`brute_force_minimum`] fixes the first
//! column, walks every arrangement of the middle columns and closes the last
//! column countermonotonically against the partial sum. [`split_minimum`]
//! splits the columns into two blocks, enumerates the sorted block-sum
//! vectors of each block separately and pairs them countermonotonically; it
//! scans the same number of arrangements with a much cheaper inner loop.
//! The two share no code beyond the matrix type, so each checks the other.

use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::rng::seeded;
use crate::{Error, RearrangementMatrix, Result};

/// Default budget on scanned arrangements.
pub const DEFAULT_BUDGET: u128 = 100_000_000;

/// A global minimum found by exhaustive search.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    /// Minimum row-sum variance over all arrangements.
    pub min_variance: f64,
    /// An arrangement attaining it.
    pub argmin_matrix: RearrangementMatrix,
    /// Arrangements examined.
    pub arrangements_scanned: u128,
}

fn factorial(m: usize) -> u128 {
    (1..=m as u128).fold(1u128, |acc, k| acc.saturating_mul(k))
}

/// `(m!)^k`, saturating.
pub fn arrangement_count(m: usize, k: usize) -> u128 {
    let f = factorial(m);
    (0..k).fold(1u128, |acc, _| acc.saturating_mul(f))
}

/// Lexicographic successor of `a`; false once `a` is the last permutation
/// (it is then reset to ascending order). Equal values are not repeated.
fn next_permutation(a: &mut [f64]) -> bool {
    let n = a.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        a.reverse();
        return false;
    }
    let mut j = n - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

fn sorted_column(x: &RearrangementMatrix, j: usize) -> Vec<f64> {
    let mut c = x.column(j).to_vec();
    c.sort_by(f64::total_cmp);
    c
}

fn sum_of_squares_antisorted(asc: &[f64], desc: &[f64]) -> f64 {
    asc.iter().zip(desc).map(|(a, b)| (a + b) * (a + b)).sum()
}

/// Exhaustive minimum of the row-sum variance over all column arrangements,
/// with the default budget.
pub fn brute_force_minimum(x: &RearrangementMatrix) -> Result<OracleResult> {
    brute_force_minimum_with_budget(x, DEFAULT_BUDGET)
}

/// Exhaustive minimum: column 1 fixed, columns `2..n-1` in every order,
/// column `n` countermonotonic to the partial sum.
pub fn brute_force_minimum_with_budget(
    x: &RearrangementMatrix,
    budget: u128,
) -> Result<OracleResult> {
    let (m, n) = (x.m(), x.n());
    let required = arrangement_count(m, n - 2);
    if required > budget {
        return Err(Error::BudgetExceeded { required, budget });
    }
    let first = x.column(0).to_vec();
    let mut last_desc = sorted_column(x, n - 1);
    last_desc.reverse();
    // middle[k] holds the current arrangement of column k + 1
    let mut middle: Vec<Vec<f64>> = (1..n - 1).map(|j| sorted_column(x, j)).collect();
    let mut best_middle = middle.clone();
    let mut best = f64::INFINITY;
    let mut scanned = 0u128;
    let mut partial = alloc::vec![0.0; m];
    let mut scratch = alloc::vec![0.0; m];
    loop {
        partial.copy_from_slice(&first);
        for col in &middle {
            for (p, v) in partial.iter_mut().zip(col) {
                *p += v;
            }
        }
        scratch.copy_from_slice(&partial);
        scratch.sort_unstable_by(f64::total_cmp);
        let ss = sum_of_squares_antisorted(&scratch, &last_desc);
        scanned += 1;
        if ss < best {
            best = ss;
            best_middle.clone_from(&middle);
        }
        // odometer: the last middle column turns fastest
        let mut k = middle.len();
        loop {
            if k == 0 {
                let argmin = close_countermonotone(&first, &best_middle, &last_desc)?;
                return Ok(OracleResult {
                    min_variance: argmin.variance(),
                    argmin_matrix: argmin,
                    arrangements_scanned: scanned,
                });
            }
            k -= 1;
            if next_permutation(&mut middle[k]) {
                break;
            }
        }
    }
}

fn close_countermonotone(
    first: &[f64],
    middle: &[Vec<f64>],
    last_desc: &[f64],
) -> Result<RearrangementMatrix> {
    let m = first.len();
    let mut partial = first.to_vec();
    for col in middle {
        for (p, v) in partial.iter_mut().zip(col) {
            *p += v;
        }
    }
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| partial[a].total_cmp(&partial[b]));
    let mut last = alloc::vec![0.0; m];
    for (k, &row) in order.iter().enumerate() {
        last[row] = last_desc[k];
    }
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(middle.len() + 2);
    cols.push(first.to_vec());
    cols.extend(middle.iter().cloned());
    cols.push(last);
    RearrangementMatrix::from_columns(&cols)
}

/// Every arrangement of `cols` (first fixed, the rest permuted), as the
/// sorted row-sum vector paired with the arrangement that produced it.
fn block_sum_vectors(cols: &[Vec<f64>]) -> Vec<(Vec<f64>, Vec<Vec<f64>>)> {
    let m = cols[0].len();
    let first = cols[0].clone();
    let mut rest: Vec<Vec<f64>> = cols[1..]
        .iter()
        .map(|c| {
            let mut c = c.clone();
            c.sort_by(f64::total_cmp);
            c
        })
        .collect();
    let mut out = Vec::new();
    loop {
        let mut s = first.clone();
        for c in &rest {
            for (a, v) in s.iter_mut().zip(c) {
                *a += v;
            }
        }
        let mut arrangement = Vec::with_capacity(cols.len());
        arrangement.push(first.clone());
        arrangement.extend(rest.iter().cloned());
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| s[a].total_cmp(&s[b]));
        // store rows in ascending-sum order so pairing is positional
        let sorted_sum: Vec<f64> = order.iter().map(|&i| s[i]).collect();
        let sorted_arr: Vec<Vec<f64>> = arrangement
            .iter()
            .map(|c| order.iter().map(|&i| c[i]).collect())
            .collect();
        out.push((sorted_sum, sorted_arr));
        let mut k = rest.len();
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            if next_permutation(&mut rest[k]) {
                break;
            }
        }
    }
}

/// Exhaustive minimum by two-block enumeration: columns `0..split` and
/// `split..n` are arranged independently and their sorted block sums paired
/// countermonotonically. `split` must lie in `1..n`.
pub fn split_minimum(x: &RearrangementMatrix, split: usize, budget: u128) -> Result<OracleResult> {
    let (m, n) = (x.m(), x.n());
    if split == 0 || split >= n {
        return Err(Error::InvalidArgument("split must lie in 1..n"));
    }
    let required = arrangement_count(m, split - 1)
        .saturating_mul(arrangement_count(m, n - split - 1));
    if required > budget {
        return Err(Error::BudgetExceeded { required, budget });
    }
    let cols: Vec<Vec<f64>> = x.columns().map(|c| c.to_vec()).collect();
    let left = block_sum_vectors(&cols[..split]);
    let right = block_sum_vectors(&cols[split..]);
    let mut best = (f64::INFINITY, 0, 0);
    for (li, (a, _)) in left.iter().enumerate() {
        for (ri, (b, _)) in right.iter().enumerate() {
            // a ascending against b descending
            let ss: f64 = a.iter().zip(b.iter().rev()).map(|(u, v)| (u + v) * (u + v)).sum();
            if ss < best.0 {
                best = (ss, li, ri);
            }
        }
    }
    let (_, li, ri) = best;
    let mut out_cols: Vec<Vec<f64>> = left[li].1.clone();
    out_cols.extend(right[ri].1.iter().map(|c| c.iter().rev().copied().collect::<Vec<_>>()));
    let argmin = RearrangementMatrix::from_columns(&out_cols)?;
    Ok(OracleResult {
        min_variance: argmin.variance(),
        argmin_matrix: argmin,
        arrangements_scanned: (left.len() as u128) * (right.len() as u128),
    })
}

/// Closed-form minimum for the matrix whose every column holds `1..=m`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HausMinimum {
    /// Minimum sample variance of the row sums.
    pub min_variance: f64,
    /// The smaller row-sum value, `floor(mu)`.
    pub value_lo: u64,
    /// Rows taking `value_lo`.
    pub count_lo: u64,
    /// Rows taking `value_lo + 1`.
    pub count_hi: u64,
}

/// Minimum row-sum variance of the `m x n` matrix with columns `1..=m`: the
/// row sums take the two integers around the mean `mu = n (m + 1) / 2`, with
/// counts that conserve the integer total `n m (m + 1) / 2`.
pub fn haus_integer_minimum(m: usize, n: usize) -> Result<HausMinimum> {
    if m < 2 || n < 2 {
        return Err(Error::Degenerate { rows: m, cols: n });
    }
    let (m64, n64) = (m as u64, n as u64);
    let total = n64 * m64 * (m64 + 1) / 2;
    let lo = total / m64;
    let count_hi = total - m64 * lo;
    let count_lo = m64 - count_hi;
    let mu = total as f64 / m as f64;
    let d_lo = lo as f64 - mu;
    let d_hi = (lo + 1) as f64 - mu;
    let ss = count_lo as f64 * d_lo * d_lo + count_hi as f64 * d_hi * d_hi;
    Ok(HausMinimum {
        min_variance: ss / (m - 1) as f64,
        value_lo: lo,
        count_lo,
        count_hi,
    })
}

/// The `m x n` matrix whose every column is `1, 2, ..., m`.
pub fn integer_matrix(m: usize, n: usize) -> Result<RearrangementMatrix> {
    let col: Vec<f64> = (1..=m).map(|v| v as f64).collect();
    let cols: Vec<Vec<f64>> = (0..n).map(|_| col.clone()).collect();
    RearrangementMatrix::from_columns(&cols)
}

/// An `m x n` matrix of standard normals with every row sum zero: iid draws,
/// each row demeaned, then scaled by `sqrt(n / (n - 1))` so each entry has
/// unit variance again.
pub fn make_zero_sum_normal_matrix(m: usize, n: usize, seed: u64) -> Result<RearrangementMatrix> {
    if m < 2 || n < 2 {
        return Err(Error::Degenerate { rows: m, cols: n });
    }
    let mut rng = seeded(seed);
    let scale = libm::sqrt(n as f64 / (n - 1) as f64);
    let mut rows = Vec::with_capacity(m);
    for _ in 0..m {
        let mut r: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let mu = crate::stats::mean(&r);
        for v in &mut r {
            *v = (*v - mu) * scale;
        }
        rows.push(r);
    }
    RearrangementMatrix::from_rows(&rows)
}

/// The uniform benchmark start: `m` iid U[0,1] draws in the first column and
/// independent random permutations of them in the other `n - 1` columns.
pub fn uniform_start(m: usize, n: usize, seed: u64) -> Result<RearrangementMatrix> {
    let mut rng = seeded(seed);
    let base: Vec<f64> = (0..m).map(|_| rng.random::<f64>()).collect();
    let mut cols = Vec::with_capacity(n);
    cols.push(base.clone());
    for _ in 1..n {
        let mut c = base.clone();
        c.shuffle(&mut rng);
        cols.push(c);
    }
    RearrangementMatrix::from_columns(&cols)
}

/// Copy of `x` with every column independently shuffled.
pub fn shuffle_columns(x: &RearrangementMatrix, seed: u64) -> RearrangementMatrix {
    let mut rng = seeded(seed);
    let cols: Vec<Vec<f64>> = x
        .columns()
        .map(|c| {
            let mut c = c.to_vec();
            c.shuffle(&mut rng);
            c
        })
        .collect();
    RearrangementMatrix::from_columns(&cols).expect("shape unchanged")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::{block_ra2, standard_ra, BlockRaConfig};
    use crate::fixtures;
    use crate::stats::sample_variance;
    use alloc::vec;

    fn sorted_cols(x: &RearrangementMatrix) -> Vec<Vec<f64>> {
        x.columns()
            .map(|c| {
                let mut c = c.to_vec();
                c.sort_by(f64::total_cmp);
                c
            })
            .collect()
    }

    #[test]
    fn next_permutation_counts() {
        let mut a = [1.0, 2.0, 3.0, 4.0];
        let mut k = 1;
        while next_permutation(&mut a) {
            k += 1;
        }
        assert_eq!(k, 24);
        assert_eq!(a, [1.0, 2.0, 3.0, 4.0]);
        let mut b = [1.0, 1.0, 2.0];
        let mut k = 1;
        while next_permutation(&mut b) {
            k += 1;
        }
        assert_eq!(k, 3);
    }

    #[test]
    fn local_minimum_margins_are_completely_mixable() {
        let r = brute_force_minimum(&fixtures::local_minimum_4x4()).unwrap();
        assert!(r.min_variance < 1e-24, "{}", r.min_variance);
        assert_eq!(r.arrangements_scanned, 24 * 24);
        assert_eq!(sorted_cols(&r.argmin_matrix), sorted_cols(&fixtures::local_minimum_4x4()));
    }

    #[test]
    fn two_row_case_matches_direct_enumeration() {
        // with m = 2 each column either stays or swaps; enumerate all 2^n
        let x = RearrangementMatrix::from_rows(&[
            vec![0.3, 1.7, -0.4, 2.2, 0.9],
            vec![1.1, -0.2, 0.8, 0.1, -1.5],
        ])
        .unwrap();
        let mut best = f64::INFINITY;
        for bits in 0u32..(1 << 5) {
            let mut s = [0.0, 0.0];
            for j in 0..5 {
                let (a, b) = (x.get(0, j), x.get(1, j));
                if bits & (1 << j) == 0 {
                    s[0] += a;
                    s[1] += b;
                } else {
                    s[0] += b;
                    s[1] += a;
                }
            }
            best = best.min(sample_variance(&s));
        }
        let r = brute_force_minimum(&x).unwrap();
        assert!((r.min_variance - best).abs() < 1e-14);
        assert_eq!(r.arrangements_scanned, 8);
    }

    #[test]
    fn haus_small_cases() {
        let h = haus_integer_minimum(3, 2).unwrap();
        assert_eq!(h.min_variance, 0.0);
        let h = haus_integer_minimum(4, 3).unwrap();
        assert_eq!((h.value_lo, h.count_lo, h.count_hi), (7, 2, 2));
        assert!((h.min_variance - 1.0 / 3.0).abs() < 1e-15);
        let b = brute_force_minimum(&integer_matrix(4, 3).unwrap()).unwrap();
        assert!((b.min_variance - h.min_variance).abs() < 1e-15);
    }

    #[test]
    fn split_and_brute_force_agree() {
        for seed in 0..6 {
            let x = uniform_start(5, 4, seed).unwrap();
            let a = brute_force_minimum(&x).unwrap();
            let b = split_minimum(&x, 2, DEFAULT_BUDGET).unwrap();
            assert!((a.min_variance - b.min_variance).abs() < 1e-14, "seed {seed}");
            assert_eq!(a.arrangements_scanned, b.arrangements_scanned);
            assert!((b.argmin_matrix.variance() - b.min_variance).abs() < 1e-15);
            assert_eq!(sorted_cols(&b.argmin_matrix), sorted_cols(&x));
            let c = split_minimum(&x, 1, DEFAULT_BUDGET).unwrap();
            assert!((a.min_variance - c.min_variance).abs() < 1e-14);
        }
    }

    #[test]
    fn oracle_lower_bounds_the_algorithms() {
        for seed in 0..10 {
            let x = uniform_start(5, 4, 100 + seed).unwrap();
            let v = brute_force_minimum(&x).unwrap().min_variance;
            let ra = standard_ra(&x, &BlockRaConfig::default()).unwrap();
            let bra = block_ra2(&ra.final_matrix, &BlockRaConfig::with_seed(seed)).unwrap();
            assert!(v <= ra.final_objective + 1e-15);
            assert!(v <= bra.final_objective + 1e-15);
            assert!(v <= x.variance() + 1e-15);
        }
    }

    #[test]
    fn budget_guard() {
        let x = uniform_start(10, 5, 1).unwrap();
        match brute_force_minimum(&x) {
            Err(Error::BudgetExceeded { required, .. }) => {
                assert_eq!(required, arrangement_count(10, 3))
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn zero_sum_normal_rows_sum_to_zero() {
        let x = make_zero_sum_normal_matrix(50, 7, 3).unwrap();
        for s in x.row_sums() {
            assert!(s.abs() <= 1e-12);
        }
        // a joint row permutation keeps zero sums
        let mut y = x.clone();
        let sigma: Vec<usize> = (0..50).rev().collect();
        for j in 0..7 {
            y.permute_column(j, &sigma).unwrap();
        }
        assert!(y.row_sums().iter().all(|s| s.abs() <= 1e-12));
    }

    #[test]
    fn zero_sum_entries_have_unit_variance() {
        let x = make_zero_sum_normal_matrix(20_000, 4, 9).unwrap();
        let all: Vec<f64> = x.as_column_major().to_vec();
        let v = sample_variance(&all);
        assert!((v - 1.0).abs() < 0.03, "{v}");
    }

    #[test]
    fn uniform_start_columns_share_values() {
        let x = uniform_start(10, 4, 5).unwrap();
        let s = sorted_cols(&x);
        assert!(s.iter().all(|c| c == &s[0]));
    }
}
