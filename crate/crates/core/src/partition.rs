//! Two-block partitions of the column set.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::fmt;

use rand::Rng;

use crate::{Error, Result};

/// A split of the columns `0..n` into a nonempty proper subset `pi` and its
/// complement.
///
/// The canonical representative of the unordered pair `{pi, complement}`
/// keeps the last column in the complement. Canonical partitions correspond
/// one-to-one with the integers `1..=2^(n-1)-1`: the bit mask of `pi` is the
/// integer itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Partition {
    mask: u64,
    n: u8,
}

/// Number of canonical partitions of `n` columns, `2^(n-1) - 1`.
pub fn partition_count(n: usize) -> u64 {
    if n < 2 {
        0
    } else if n > 64 {
        u64::MAX
    } else {
        (1u64 << (n - 1)) - 1
    }
}

fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl Partition {
    /// Builds the partition whose first side holds `columns`.
    pub fn new(columns: &[usize], n: usize) -> Result<Self> {
        if n > 64 {
            return Err(Error::TooManyColumns(n));
        }
        let mut mask = 0u64;
        for &c in columns {
            if c >= n {
                return Err(Error::ColumnOutOfRange { column: c, n });
            }
            mask |= 1 << c;
        }
        Self::from_mask(mask, n)
    }

    /// Builds a partition from the bit mask of its first side.
    pub fn from_mask(mask: u64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidPartition("need at least two columns"));
        }
        if n > 64 {
            return Err(Error::TooManyColumns(n));
        }
        if mask & !full_mask(n) != 0 {
            return Err(Error::InvalidPartition("mask has bits beyond n"));
        }
        if mask == 0 || mask == full_mask(n) {
            return Err(Error::EmptyPartitionSide);
        }
        Ok(Self { mask, n: n as u8 })
    }

    /// The partition with `pi = {column}`'s complement fixed and `column`
    /// moving, i.e. `pi` = every column except `column`.
    pub fn all_but(column: usize, n: usize) -> Result<Self> {
        if column >= n {
            return Err(Error::ColumnOutOfRange { column, n });
        }
        Self::from_mask(full_mask(n) & !(1 << column), n)
    }

    /// The `index`-th canonical partition, `index` in `1..=partition_count(n)`.
    pub fn canonical_from_index(index: u64, n: usize) -> Result<Self> {
        if index == 0 || index > partition_count(n) {
            return Err(Error::InvalidPartition("canonical index out of range"));
        }
        Self::from_mask(index, n)
    }

    /// Number of columns this partition splits.
    pub fn n(&self) -> usize {
        self.n as usize
    }

    /// Bit mask of the first side.
    pub fn pi_mask(&self) -> u64 {
        self.mask
    }

    /// Bit mask of the complement.
    pub fn complement_mask(&self) -> u64 {
        !self.mask & full_mask(self.n())
    }

    /// Columns of the first side, ascending.
    pub fn pi(&self) -> Vec<usize> {
        columns_of(self.mask, self.n())
    }

    /// Columns of the complement, ascending.
    pub fn complement(&self) -> Vec<usize> {
        columns_of(self.complement_mask(), self.n())
    }

    /// The same split with the sides swapped.
    pub fn swapped(&self) -> Self {
        Self { mask: self.complement_mask(), n: self.n }
    }

    /// Whether this is the canonical representative (last column in the
    /// complement).
    pub fn is_canonical(&self) -> bool {
        self.mask & (1 << (self.n - 1)) == 0
    }

    /// The canonical representative of `{pi, complement}`.
    pub fn canonical(&self) -> Self {
        if self.is_canonical() {
            *self
        } else {
            self.swapped()
        }
    }

    /// Position of the canonical representative in the enumeration order,
    /// `1..=partition_count(n)`.
    pub fn canonical_index(&self) -> u64 {
        self.canonical().mask
    }
}

fn columns_of(mask: u64, n: usize) -> Vec<usize> {
    (0..n).filter(|&c| mask & (1 << c) != 0).collect()
}

impl fmt::Display for Partition {
    /// One-based, e.g. `{1,2}|{3,4}`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = |f: &mut fmt::Formatter<'_>, cols: Vec<usize>| -> fmt::Result {
            f.write_str("{")?;
            for (k, c) in cols.iter().enumerate() {
                if k > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{}", c + 1)?;
            }
            f.write_str("}")
        };
        side(f, self.pi())?;
        f.write_str("|")?;
        side(f, self.complement())
    }
}

/// Every canonical partition of `n` columns in binary-counter order.
pub fn all_canonical(n: usize) -> impl Iterator<Item = Partition> {
    let count = if n <= 64 { partition_count(n) } else { 0 };
    (1..=count).map(move |k| Partition { mask: k, n: n as u8 })
}

/// A canonical partition drawn uniformly.
pub fn uniform_canonical<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Partition {
    let k = rng.random_range(1..=partition_count(n));
    Partition { mask: k, n: n as u8 }
}

/// `n_sim` distinct canonical partitions drawn uniformly without replacement,
/// in draw order. When `n_sim` covers every partition this is a uniformly
/// random ordering of all of them.
pub fn sample_partitions<R: Rng + ?Sized>(
    n: usize,
    n_sim: usize,
    rng: &mut R,
) -> Result<Vec<Partition>> {
    if n < 2 {
        return Err(Error::InvalidPartition("need at least two columns"));
    }
    if n > 64 {
        return Err(Error::TooManyColumns(n));
    }
    let p = partition_count(n);
    let n_sim = n_sim.min(p as usize);
    let make = |k: u64| Partition { mask: k, n: n as u8 };
    if p <= 4 * n_sim as u64 {
        // partial Fisher-Yates over the whole index range
        let mut pool: Vec<u64> = (1..=p).collect();
        for i in 0..n_sim {
            let j = rng.random_range(i..pool.len());
            pool.swap(i, j);
        }
        Ok(pool[..n_sim].iter().map(|&k| make(k)).collect())
    } else {
        let mut seen = BTreeSet::new();
        let mut out = Vec::with_capacity(n_sim);
        while out.len() < n_sim {
            let k = rng.random_range(1..=p);
            if seen.insert(k) {
                out.push(make(k));
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use alloc::string::ToString;
    use alloc::vec;

    #[test]
    fn counts() {
        assert_eq!(partition_count(2), 1);
        assert_eq!(partition_count(4), 7);
        assert_eq!(partition_count(11), 1023);
        assert_eq!(all_canonical(4).count(), 7);
    }

    #[test]
    fn rejects_empty_sides() {
        assert_eq!(Partition::new(&[], 3), Err(Error::EmptyPartitionSide));
        assert_eq!(Partition::new(&[0, 1, 2], 3), Err(Error::EmptyPartitionSide));
        assert!(matches!(
            Partition::new(&[5], 3),
            Err(Error::ColumnOutOfRange { .. })
        ));
    }

    #[test]
    fn canonical_form_keeps_last_column_in_complement() {
        let p = Partition::new(&[1, 3], 4).unwrap();
        assert!(!p.is_canonical());
        let c = p.canonical();
        assert_eq!(c.pi(), vec![0, 2]);
        assert_eq!(c.complement(), vec![1, 3]);
        for q in all_canonical(5) {
            assert!(q.is_canonical());
            assert_eq!(q.swapped().canonical(), q);
        }
    }

    #[test]
    fn display_is_one_based() {
        let p = Partition::new(&[0, 1], 4).unwrap();
        assert_eq!(p.to_string(), "{1,2}|{3,4}");
    }

    #[test]
    fn sampling_small_n_is_full_enumeration() {
        let mut rng = seeded(3);
        let mut all = sample_partitions(4, 512, &mut rng).unwrap();
        let orders: BTreeSet<Vec<Partition>> =
            (0..20).map(|_| sample_partitions(4, 7, &mut rng).unwrap()).collect();
        assert!(orders.len() > 1);
        all.sort();
        assert_eq!(all, all_canonical(4).collect::<Vec<_>>());
        let two = sample_partitions(2, 512, &mut rng).unwrap();
        assert_eq!(two.len(), 1);
        assert_eq!(two[0].pi(), vec![0]);
        assert_eq!(two[0].complement(), vec![1]);
    }

    #[test]
    fn sampling_is_distinct_and_repeatable() {
        let a = sample_partitions(11, 512, &mut seeded(99)).unwrap();
        let b = sample_partitions(11, 512, &mut seeded(99)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 512);
        let set: BTreeSet<_> = a.iter().collect();
        assert_eq!(set.len(), 512);
        assert!(a.iter().all(|p| p.is_canonical()));
        // rejection path
        let c = sample_partitions(30, 100, &mut seeded(1)).unwrap();
        let set: BTreeSet<_> = c.iter().collect();
        assert_eq!(set.len(), 100);
    }
}
