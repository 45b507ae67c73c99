//! Node-to-cluster assignments, the common output of every pipeline.

use crate::error::{Error, Result};

/// Label given to nodes that were excluded from clustering (isolated nodes).
pub const UNASSIGNED: i32 = -1;

/// Cluster assignment over n nodes: labels in `0..k`, or [`UNASSIGNED`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    labels: Vec<i32>,
    k: usize,
}

impl Partition {
    pub fn new(labels: Vec<i32>, k: usize) -> Result<Self> {
        for &l in &labels {
            if l != UNASSIGNED && (l < 0 || l as usize >= k) {
                return Err(Error::InvalidInput(format!(
                    "label {l} outside 0..{k} (or -1)"
                )));
            }
        }
        Ok(Partition { labels, k })
    }

    /// Build from cluster indices, compacting `k` to the labels actually used.
    pub fn from_cluster_indices(indices: &[usize]) -> Partition {
        let k = indices.iter().copied().max().map_or(0, |m| m + 1);
        Partition {
            labels: indices.iter().map(|&c| c as i32).collect(),
            k,
        }
    }

    pub fn labels(&self) -> &[i32] {
        &self.labels
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Number of distinct non-reserved labels that actually occur.
    pub fn occupied_clusters(&self) -> usize {
        let mut seen = vec![false; self.k];
        for &l in &self.labels {
            if l >= 0 {
                seen[l as usize] = true;
            }
        }
        seen.iter().filter(|&&s| s).count()
    }

    /// Relabel clusters by first occurrence so equivalent partitions compare
    /// equal; reserved labels stay put.
    pub fn canonicalize(&self) -> Partition {
        let mut map = std::collections::HashMap::new();
        let mut next = 0i32;
        let labels: Vec<i32> = self
            .labels
            .iter()
            .map(|&l| {
                if l == UNASSIGNED {
                    UNASSIGNED
                } else {
                    *map.entry(l).or_insert_with(|| {
                        let v = next;
                        next += 1;
                        v
                    })
                }
            })
            .collect();
        Partition {
            labels,
            k: next as usize,
        }
    }

    /// Spread `inner` labels over `n` positions, writing [`UNASSIGNED`]
    /// everywhere not covered by `kept` (original indices of inner nodes).
    pub fn expand(inner: &Partition, kept: &[usize], n: usize) -> Partition {
        let mut labels = vec![UNASSIGNED; n];
        for (pos, &orig) in kept.iter().enumerate() {
            labels[orig] = inner.labels[pos];
        }
        Partition { labels, k: inner.k }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonicalize_by_first_occurrence() {
        let p = Partition::new(vec![2, 2, 0, -1, 1], 3).unwrap();
        let c = p.canonicalize();
        assert_eq!(c.labels(), &[0, 0, 1, -1, 2]);
    }

    #[test]
    fn expand_marks_missing() {
        let inner = Partition::new(vec![0, 1, 0], 2).unwrap();
        let full = Partition::expand(&inner, &[0, 2, 4], 5);
        assert_eq!(full.labels(), &[0, -1, 1, -1, 0]);
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(Partition::new(vec![0, 3], 4).is_ok());
        assert!(Partition::new(vec![0, 3], 3).is_err());
        assert!(Partition::new(vec![-2], 2).is_err());
    }

    #[test]
    fn occupied_counts_used_labels() {
        let p = Partition::new(vec![0, 0, 2], 4).unwrap();
        assert_eq!(p.occupied_clusters(), 2);
    }
}
