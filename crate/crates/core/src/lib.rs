//! Clustering toolkit for weighted directed graphs built from trip records.
//!
//! The pipeline turns origin/destination trip data into a dense weighted
//! digraph and offers nine clustering paths over it: unnormalized and
//! normalized spectral clustering, Leiden (constant Potts model), Walktrap,
//! two symmetrization routes for directed input, a directed Laplacian
//! route, SVD embedding, and a random-walk spectral method. A planted
//! stochastic-block-model generator and partition-agreement metrics (ARI,
//! NMI) support validation.

pub mod community;
pub mod error;
pub mod eval;
pub mod graph;
pub mod matrix;
pub mod numerics;
pub mod partition;
pub mod spectral;
pub mod synth;

pub use error::{Error, ErrorKind, Result};
pub use graph::{WeightMode, WeightedDigraph};
pub use matrix::DenseMatrix;
pub use partition::Partition;
