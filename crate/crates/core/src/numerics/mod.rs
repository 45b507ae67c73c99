//! Dense linear-algebra kernels sized for graphs of a few hundred nodes:
//! symmetric eigendecomposition, SVD, general spectra of transition matrices,
//! stationary distributions, and k-means.

mod eigh;
mod general_eig;
mod kmeans;
mod markov;
mod svd;

pub use eigh::{eigh_symmetric, EigenPairs};
pub(crate) use eigh::normalize_and_fix_sign;
pub use general_eig::{eigenvalues, eigenvector_for};
pub use kmeans::{kmeans, KmeansResult};
pub use markov::{
    second_eigenpair, sorted_spectrum, stationary, transition_matrix, ComplexEigenPair,
    StationaryDistribution,
};
pub use svd::{svd, SvdResult};
