//! The matrix model and the countermonotone block rearrangement.
//!
//! A [`RearrangementMatrix`] holds `m` rows and `n` columns. Each column is a
//! fixed multiset of values (a discretized margin); only the assignment of
//! values to rows changes. No operation here alters a column's multiset.

use alloc::vec::Vec;
use crate::objective::Objective;
use crate::partition::Partition;
use crate::stats::sample_variance;
use crate::{Error, Result};

/// An `m x n` real matrix whose columns are margins and whose rows are the
/// optimization variable. Stored column-major.
#[derive(Debug, Clone, PartialEq)]
pub struct RearrangementMatrix {
    m: usize,
    n: usize,
    data: Vec<f64>,
}

impl RearrangementMatrix {
    /// Builds a matrix from its columns.
    pub fn from_columns<C: AsRef<[f64]>>(columns: &[C]) -> Result<Self> {
        let n = columns.len();
        let m = columns.first().map_or(0, |c| c.as_ref().len());
        if columns.iter().any(|c| c.as_ref().len() != m) {
            return Err(Error::Ragged);
        }
        let mut data = Vec::with_capacity(m * n);
        for c in columns {
            data.extend_from_slice(c.as_ref());
        }
        Self::from_column_major(m, n, data)
    }

    /// Builds a matrix from its rows.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, |r| r.as_ref().len());
        if rows.iter().any(|r| r.as_ref().len() != n) {
            return Err(Error::Ragged);
        }
        let mut data = alloc::vec![0.0; m * n];
        for (i, r) in rows.iter().enumerate() {
            for (j, &v) in r.as_ref().iter().enumerate() {
                data[j * m + i] = v;
            }
        }
        Self::from_column_major(m, n, data)
    }

    /// Builds a matrix from a column-major buffer of length `m * n`.
    pub fn from_column_major(m: usize, n: usize, data: Vec<f64>) -> Result<Self> {
        if m < 2 || n < 2 {
            return Err(Error::Degenerate { rows: m, cols: n });
        }
        if data.len() != m * n {
            return Err(Error::LengthMismatch { expected: m * n, found: data.len() });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { m, n, data })
    }

    /// Row count.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Column count.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Column `j`.
    pub fn column(&self, j: usize) -> &[f64] {
        &self.data[j * self.m..(j + 1) * self.m]
    }

    pub(crate) fn column_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.m..(j + 1) * self.m]
    }

    /// Entry at row `i`, column `j`.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[j * self.m + i]
    }

    /// Row `i` as a vector.
    pub fn row(&self, i: usize) -> Vec<f64> {
        (0..self.n).map(|j| self.get(i, j)).collect()
    }

    /// All rows.
    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.m).map(|i| self.row(i)).collect()
    }

    /// Iterator over columns.
    pub fn columns(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.m)
    }

    /// The column-major buffer.
    pub fn as_column_major(&self) -> &[f64] {
        &self.data
    }

    /// Sum over all columns, per row.
    pub fn row_sums(&self) -> Vec<f64> {
        let mut s = self.column(0).to_vec();
        for col in self.columns().skip(1) {
            for (acc, &v) in s.iter_mut().zip(col) {
                *acc += v;
            }
        }
        s
    }

    /// Per-row sums over the given columns.
    pub fn sums_over(&self, cols: &[usize]) -> Result<Vec<f64>> {
        let (&first, rest) = cols.split_first().ok_or(Error::EmptyPartitionSide)?;
        for &c in cols {
            if c >= self.n {
                return Err(Error::ColumnOutOfRange { column: c, n: self.n });
            }
        }
        let mut s = self.column(first).to_vec();
        for &c in rest {
            for (acc, &v) in s.iter_mut().zip(self.column(c)) {
                *acc += v;
            }
        }
        Ok(s)
    }

    /// Per-row sums over the columns whose bit is set in `mask`.
    pub(crate) fn sums_mask(&self, mask: u64) -> Vec<f64> {
        let mut s = alloc::vec![0.0; self.m];
        let mut first = true;
        for j in 0..self.n {
            if mask & (1 << j) == 0 {
                continue;
            }
            let col = self.column(j);
            if first {
                s.copy_from_slice(col);
                first = false;
            } else {
                for (acc, &v) in s.iter_mut().zip(col) {
                    *acc += v;
                }
            }
        }
        s
    }

    /// Row sums of both sides of a partition, `(S_pi, S_complement)`.
    pub fn partition_sums(&self, partition: &Partition) -> Result<(Vec<f64>, Vec<f64>)> {
        self.check_partition(partition)?;
        Ok((
            self.sums_mask(partition.pi_mask()),
            self.sums_mask(partition.complement_mask()),
        ))
    }

    fn check_partition(&self, partition: &Partition) -> Result<()> {
        if partition.n() != self.n {
            Err(Error::InvalidPartition("partition column count differs from matrix"))
        } else {
            Ok(())
        }
    }

    /// Sample variance (divisor `m - 1`) of the full row sums.
    pub fn variance(&self) -> f64 {
        sample_variance(&self.row_sums())
    }

    /// Evaluates an objective on the full row sums.
    pub fn objective(&self, objective: &Objective) -> Result<f64> {
        objective.evaluate(&self.row_sums())
    }

    /// Reorders column `j` in place: the new entry at row `i` is the old entry
    /// at row `sigma[i]`.
    pub fn permute_column(&mut self, j: usize, sigma: &[usize]) -> Result<()> {
        if j >= self.n {
            return Err(Error::ColumnOutOfRange { column: j, n: self.n });
        }
        check_permutation(sigma, self.m)?;
        let old = self.column(j).to_vec();
        for (dst, &src) in self.column_mut(j).iter_mut().zip(sigma) {
            *dst = old[src];
        }
        Ok(())
    }

    /// Copy of the matrix with column `j` reordered by `sigma`.
    pub fn with_permuted_column(&self, j: usize, sigma: &[usize]) -> Result<Self> {
        let mut out = self.clone();
        out.permute_column(j, sigma)?;
        Ok(out)
    }

    /// Moves whole rows of the columns in `mask`: new row `i` of that block is
    /// old row `source[i]`. `source` must be a valid permutation.
    pub(crate) fn permute_block_rows(&mut self, mask: u64, source: &[usize]) {
        let m = self.m;
        let mut scratch = alloc::vec![0.0; m];
        for j in 0..self.n {
            if mask & (1 << j) == 0 {
                continue;
            }
            let col = self.column_mut(j);
            for (dst, &src) in scratch.iter_mut().zip(source) {
                *dst = col[src];
            }
            col.copy_from_slice(&scratch);
        }
    }

    /// Rearranges the rows of the complement block jointly so that its row
    /// sums are countermonotonic to those of `pi`. The `pi` block is left
    /// untouched. Returns whether any row moved.
    ///
    /// Ties are broken so that an input that is already (weakly)
    /// countermonotonic is returned unchanged.
    pub fn countermonotone_rearrange(&mut self, partition: &Partition) -> Result<bool> {
        self.check_partition(partition)?;
        let fixed = self.sums_mask(partition.pi_mask());
        let moving = self.sums_mask(partition.complement_mask());
        let Some(source) = countermonotone_source(&fixed, &moving) else {
            return Ok(false);
        };
        #[cfg(debug_assertions)]
        let before = {
            let s: Vec<f64> = fixed.iter().zip(&moving).map(|(a, b)| a + b).collect();
            sample_variance(&s)
        };
        self.permute_block_rows(partition.complement_mask(), &source);
        #[cfg(debug_assertions)]
        {
            let s: Vec<f64> = fixed.iter().zip(&source).map(|(a, &k)| a + moving[k]).collect();
            let after = sample_variance(&s);
            debug_assert!(
                after <= before + 1e-12 * (1.0 + before),
                "countermonotone rearrangement increased variance: {before} -> {after}"
            );
        }
        Ok(true)
    }

    /// Makes column `j` countermonotonic with the sum of the other columns.
    /// Returns whether the column changed. Works for any column count.
    pub fn countermonotone_column(&mut self, j: usize) -> Result<bool> {
        if j >= self.n {
            return Err(Error::ColumnOutOfRange { column: j, n: self.n });
        }
        let mut rest = alloc::vec![0.0; self.m];
        for (c, col) in self.columns().enumerate() {
            if c != j {
                for (acc, &v) in rest.iter_mut().zip(col) {
                    *acc += v;
                }
            }
        }
        let Some(source) = countermonotone_source(&rest, self.column(j)) else {
            return Ok(false);
        };
        let old = self.column(j).to_vec();
        for (dst, &src) in self.column_mut(j).iter_mut().zip(&source) {
            *dst = old[src];
        }
        Ok(true)
    }

    /// Copy of the matrix after [`Self::countermonotone_rearrange`].
    pub fn countermonotone_rearranged(&self, partition: &Partition) -> Result<Self> {
        let mut out = self.clone();
        out.countermonotone_rearrange(partition)?;
        Ok(out)
    }

    /// Whether the two sides of `partition` are already countermonotonic
    /// (the countermonotone rearrangement would not move any row).
    pub fn is_countermonotone(&self, partition: &Partition) -> Result<bool> {
        let (fixed, moving) = self.partition_sums(partition)?;
        Ok(countermonotone_source(&fixed, &moving).is_none())
    }
}

/// Checks that `sigma` is a bijection on `0..m`.
pub fn check_permutation(sigma: &[usize], m: usize) -> Result<()> {
    if sigma.len() != m {
        return Err(Error::MalformedPermutation);
    }
    let mut seen = alloc::vec![false; m];
    for &s in sigma {
        if s >= m || seen[s] {
            return Err(Error::MalformedPermutation);
        }
        seen[s] = true;
    }
    Ok(())
}

/// For each destination row, the source row whose `moving` value it receives
/// so that the received values are ordered oppositely to `fixed`. `None` when
/// that assignment is the identity.
///
/// Destinations are ordered by (`fixed` ascending, current `moving`
/// descending, index) and sources by (`moving` descending, current `fixed`
/// ascending, index). On a weakly countermonotone input the two orders agree,
/// which makes the map the identity.
pub(crate) fn countermonotone_source(fixed: &[f64], moving: &[f64]) -> Option<Vec<usize>> {
    let m = fixed.len();
    let mut dest: Vec<(f64, f64, usize)> = (0..m).map(|i| (fixed[i], moving[i], i)).collect();
    dest.sort_unstable_by(|a, b| {
        a.0.total_cmp(&b.0)
            .then_with(|| b.1.total_cmp(&a.1))
            .then_with(|| a.2.cmp(&b.2))
    });
    let mut src: Vec<(f64, f64, usize)> = (0..m).map(|i| (moving[i], fixed[i], i)).collect();
    src.sort_unstable_by(|a, b| {
        b.0.total_cmp(&a.0)
            .then_with(|| a.1.total_cmp(&b.1))
            .then_with(|| a.2.cmp(&b.2))
    });
    let mut source = alloc::vec![0usize; m];
    let mut identity = true;
    for (d, s) in dest.iter().zip(&src) {
        source[d.2] = s.2;
        identity &= d.2 == s.2;
    }
    (!identity).then_some(source)
}

/// Assigns the block rows so that the received `moving` sums are ranked like
/// `order_keys`: the row whose key is `k`-th smallest receives the `k`-th
/// smallest `moving` value. Ties in `moving` keep index order.
pub(crate) fn ranked_source(order_by_key: &[usize], moving: &[f64]) -> Vec<usize> {
    let mut src: Vec<usize> = (0..moving.len()).collect();
    src.sort_by(|&a, &b| moving[a].total_cmp(&moving[b]));
    let mut source = alloc::vec![0usize; moving.len()];
    for (&dst, &s) in order_by_key.iter().zip(&src) {
        source[dst] = s;
    }
    source
}
