//! Ranking of real vectors.

use alloc::vec::Vec;

/// How tied values are ranked.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum TieMode {
    /// Tied values share the mean of the ranks they span (Spearman convention).
    Average,
    /// Ties are broken by original index.
    StableFirst,
}

/// Indices that sort `v` ascending; ties keep index order.
pub fn argsort(v: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    idx
}

/// One-based ranks of `v`.
///
/// `(3, 1, 2)` ranks to `(3, 1, 2)`; `(5, 5)` ranks to `(1.5, 1.5)` under
/// [`TieMode::Average`] and `(1, 2)` under [`TieMode::StableFirst`].
pub fn rank_vector(v: &[f64], ties: TieMode) -> Vec<f64> {
    let order = argsort(v);
    let mut ranks = alloc::vec![0.0; v.len()];
    match ties {
        TieMode::StableFirst => {
            for (pos, &i) in order.iter().enumerate() {
                ranks[i] = (pos + 1) as f64;
            }
        }
        TieMode::Average => {
            let mut start = 0;
            while start < order.len() {
                let mut end = start + 1;
                while end < order.len() && v[order[end]] == v[order[start]] {
                    end += 1;
                }
                // positions start..end hold ranks start+1 ..= end
                let avg = (start + 1 + end) as f64 / 2.0;
                for &i in &order[start..end] {
                    ranks[i] = avg;
                }
                start = end;
            }
        }
    }
    ranks
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn distinct_values() {
        assert_eq!(rank_vector(&[3.0, 1.0, 2.0], TieMode::Average), vec![3.0, 1.0, 2.0]);
        assert_eq!(
            rank_vector(&[3.0, 1.0, 2.0], TieMode::StableFirst),
            vec![3.0, 1.0, 2.0]
        );
    }

    #[test]
    fn ties() {
        assert_eq!(rank_vector(&[5.0, 5.0], TieMode::Average), vec![1.5, 1.5]);
        assert_eq!(rank_vector(&[5.0, 5.0], TieMode::StableFirst), vec![1.0, 2.0]);
        assert_eq!(
            rank_vector(&[2.0, 1.0, 2.0, 2.0], TieMode::Average),
            vec![3.0, 1.0, 3.0, 3.0]
        );
    }

    #[test]
    fn empty() {
        assert!(rank_vector(&[], TieMode::Average).is_empty());
    }
}
