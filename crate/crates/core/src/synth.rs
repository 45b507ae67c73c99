//! Directed weighted stochastic-block-model generator: planted ground truth
//! for recovery testing.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::WeightedDigraph;
use crate::matrix::DenseMatrix;
use crate::partition::Partition;

#[derive(Debug, Clone)]
pub struct SbmSpec {
    pub block_sizes: Vec<usize>,
    /// Edge probability inside a block.
    pub p_in: f64,
    /// Edge probability across blocks.
    pub p_out: f64,
    /// Uniform weight range [lo, hi] for intra-block edges.
    pub w_in: (f64, f64),
    /// Uniform weight range [lo, hi] for cross-block edges.
    pub w_out: (f64, f64),
    pub seed: u64,
}

impl SbmSpec {
    /// Unit-weight model with the given blocks and probabilities.
    pub fn unit(block_sizes: Vec<usize>, p_in: f64, p_out: f64, seed: u64) -> Self {
        SbmSpec {
            block_sizes,
            p_in,
            p_out,
            w_in: (1.0, 1.0),
            w_out: (1.0, 1.0),
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        let n: usize = self.block_sizes.iter().sum();
        if n == 0 {
            return Err(Error::Domain("total node count is zero".into()));
        }
        if self.block_sizes.contains(&0) {
            return Err(Error::Config("block sizes must be positive".into()));
        }
        for p in [self.p_in, self.p_out] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Config(format!("probability {p} outside [0, 1]")));
            }
        }
        for (lo, hi) in [self.w_in, self.w_out] {
            if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
                return Err(Error::Config(format!(
                    "weight range [{lo}, {hi}] must satisfy 0 < lo <= hi"
                )));
            }
        }
        Ok(())
    }
}

/// Sample a directed SBM; returns the graph (node ids 1..=n) and the planted
/// block partition. No self-loops; every edge counts as one observation.
pub fn generate_sbm(spec: &SbmSpec) -> Result<(WeightedDigraph, Partition)> {
    spec.validate()?;
    let n: usize = spec.block_sizes.iter().sum();
    let mut block = Vec::with_capacity(n);
    for (b, &size) in spec.block_sizes.iter().enumerate() {
        block.extend(std::iter::repeat_n(b, size));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut weights = DenseMatrix::zeros(n, n);
    let mut counts = vec![0u64; n * n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let same = block[i] == block[j];
            let p = if same { spec.p_in } else { spec.p_out };
            if !rng.gen_bool(p) {
                continue;
            }
            let (lo, hi) = if same { spec.w_in } else { spec.w_out };
            let w = if lo == hi { lo } else { rng.gen_range(lo..=hi) };
            weights[(i, j)] = w;
            counts[i * n + j] = 1;
        }
    }

    let node_ids: Vec<u32> = (1..=n as u32).collect();
    let graph = WeightedDigraph::from_parts(node_ids, weights, counts)?;
    let truth = Partition::from_cluster_indices(&block);
    Ok((graph, truth))
}
