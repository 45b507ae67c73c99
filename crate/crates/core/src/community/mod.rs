//! Non-spectral community detection on undirected graphs: Leiden with the
//! constant Potts model, and Walktrap agglomeration.

mod leiden;
mod walktrap;

pub use leiden::{cpm_quality, default_gamma, leiden, LeidenConfig};
pub use walktrap::{walktrap, walktrap_distance, Dendrogram, Merge, WalktrapConfig};

use crate::matrix::DenseMatrix;

/// Newman–Girvan weighted modularity of a labelling (reserved labels count
/// as singleton clusters of their own node).
pub(crate) fn modularity(wu: &DenseMatrix, labels: &[usize]) -> f64 {
    let n = wu.rows();
    let degrees = wu.row_sums();
    let total: f64 = degrees.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    let k = labels.iter().copied().max().map_or(0, |m| m + 1);
    let mut intra = vec![0.0; k];
    let mut deg = vec![0.0; k];
    for i in 0..n {
        deg[labels[i]] += degrees[i];
        for j in 0..n {
            if labels[i] == labels[j] {
                intra[labels[i]] += wu.get(i, j);
            }
        }
    }
    (0..k)
        .map(|c| intra[c] / total - (deg[c] / total).powi(2))
        .sum()
}
