//! Trip aggregation into a weighted directed graph, symmetrizations, degree
//! and connectivity helpers, and the graph file format.

mod components;
mod ingest;
mod io;

pub use components::{is_aperiodic, strongly_connected_components, weak_components};
pub use ingest::{ingest_trips, IngestSummary, TripColumns};
pub use io::{read_graph, read_graph_file, write_graph, write_graph_file};

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

/// One taxi trip between two community areas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TripRecord {
    pub pickup_area: u32,
    pub dropoff_area: u32,
    pub duration_seconds: f64,
}

/// How observed trips map onto edge weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WeightMode {
    /// Arithmetic mean of trip durations per ordered pair.
    #[default]
    MeanTravelTime,
    /// Number of observed trips per ordered pair.
    TripCount,
    /// Reciprocal of the mean duration (0 where no trips).
    InverseMeanTime,
}

impl WeightMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            WeightMode::MeanTravelTime => "mean-travel-time",
            WeightMode::TripCount => "trip-count",
            WeightMode::InverseMeanTime => "inverse-mean-time",
        }
    }

    pub fn parse(s: &str) -> Result<WeightMode> {
        match s {
            "mean-travel-time" => Ok(WeightMode::MeanTravelTime),
            "trip-count" => Ok(WeightMode::TripCount),
            "inverse-mean-time" => Ok(WeightMode::InverseMeanTime),
            other => Err(Error::Config(format!("unknown weight mode '{other}'"))),
        }
    }
}

/// Weighted directed graph over the original node ids, with per-pair trip
/// counts kept alongside the weight matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedDigraph {
    node_ids: Vec<u32>,
    weights: DenseMatrix,
    counts: Vec<u64>,
}

impl WeightedDigraph {
    pub fn from_parts(node_ids: Vec<u32>, weights: DenseMatrix, counts: Vec<u64>) -> Result<Self> {
        let n = node_ids.len();
        if weights.rows() != n || weights.cols() != n {
            return Err(Error::InvalidInput(format!(
                "weight matrix is {}x{}, expected {n}x{n}",
                weights.rows(),
                weights.cols()
            )));
        }
        if counts.len() != n * n {
            return Err(Error::InvalidInput("counts shape mismatch".into()));
        }
        weights.validate_finite()?;
        if weights.data().iter().any(|&w| w < 0.0) {
            return Err(Error::InvalidInput("negative edge weight".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for &id in &node_ids {
            if id == 0 {
                return Err(Error::InvalidInput("node ids must be positive".into()));
            }
            if !seen.insert(id) {
                return Err(Error::InvalidInput(format!("duplicate node id {id}")));
            }
        }
        Ok(WeightedDigraph {
            node_ids,
            weights,
            counts,
        })
    }

    pub fn n(&self) -> usize {
        self.node_ids.len()
    }

    pub fn node_ids(&self) -> &[u32] {
        &self.node_ids
    }

    pub fn weights(&self) -> &DenseMatrix {
        &self.weights
    }

    pub fn count(&self, i: usize, j: usize) -> u64 {
        self.counts[i * self.n() + j]
    }

    pub fn index_of(&self, id: u32) -> Option<usize> {
        self.node_ids.iter().position(|&x| x == id)
    }

    /// Number of ordered pairs carrying weight or observations.
    pub fn edge_count(&self) -> usize {
        let n = self.n();
        (0..n * n)
            .filter(|&x| self.weights.data()[x] != 0.0 || self.counts[x] != 0)
            .count()
    }
}

/// Out-degrees dᵢ = Σⱼ W[i][j], with a diagonal-matrix view on demand.
#[derive(Debug, Clone)]
pub struct DegreeInfo {
    pub out_degrees: Vec<f64>,
}

impl DegreeInfo {
    pub fn diagonal_matrix(&self) -> DenseMatrix {
        let n = self.out_degrees.len();
        let mut d = DenseMatrix::zeros(n, n);
        for (i, &x) in self.out_degrees.iter().enumerate() {
            d[(i, i)] = x;
        }
        d
    }
}

/// Aggregate trips into a weighted digraph; nodes are the sorted distinct
/// area ids seen in the records.
pub fn build_graph(records: &[TripRecord], mode: WeightMode) -> Result<WeightedDigraph> {
    if records.is_empty() {
        return Err(Error::Domain("cannot build a graph from zero trips".into()));
    }
    let mut index: BTreeMap<u32, usize> = BTreeMap::new();
    for r in records {
        index.entry(r.pickup_area).or_default();
        index.entry(r.dropoff_area).or_default();
    }
    let node_ids: Vec<u32> = index.keys().copied().collect();
    for (pos, id) in node_ids.iter().enumerate() {
        *index.get_mut(id).unwrap() = pos;
    }
    let n = node_ids.len();

    let mut counts = vec![0u64; n * n];
    let mut sums = vec![0.0f64; n * n];
    for r in records {
        let i = index[&r.pickup_area];
        let j = index[&r.dropoff_area];
        counts[i * n + j] += 1;
        sums[i * n + j] += r.duration_seconds;
    }

    let weights = DenseMatrix::from_fn(n, n, |i, j| {
        let c = counts[i * n + j];
        if c == 0 {
            return 0.0;
        }
        let mean = sums[i * n + j] / c as f64;
        match mode {
            WeightMode::MeanTravelTime => mean,
            WeightMode::TripCount => c as f64,
            WeightMode::InverseMeanTime => {
                if mean > 0.0 {
                    1.0 / mean
                } else {
                    0.0
                }
            }
        }
    });

    WeightedDigraph::from_parts(node_ids, weights, counts)
}

/// Undirected view with weight matrix W + Wᵀ; counts merge the same way.
pub fn simple_symmetrize(g: &WeightedDigraph) -> WeightedDigraph {
    let n = g.n();
    let w = &g.weights;
    let mut sym = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = w.get(i, j) + w.get(j, i);
            sym[(i, j)] = v;
            sym[(j, i)] = v;
        }
    }
    let counts = (0..n * n)
        .map(|x| {
            let (i, j) = (x / n, x % n);
            g.counts[i * n + j] + g.counts[j * n + i]
        })
        .collect();
    WeightedDigraph {
        node_ids: g.node_ids.clone(),
        weights: sym,
        counts,
    }
}

/// Undirected view with weight matrix WᵀW + WWᵀ (common in-neighbours plus
/// common out-neighbours). Counts become presence indicators, since the
/// product weights no longer correspond to observation tallies.
pub fn bibliometric_symmetrize(g: &WeightedDigraph) -> WeightedDigraph {
    let n = g.n();
    let w = &g.weights;
    let mut sym = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            // (WᵀW)[i][j] + (WWᵀ)[i][j]
            let mut v = 0.0;
            for k in 0..n {
                v += w.get(k, i) * w.get(k, j) + w.get(i, k) * w.get(j, k);
            }
            sym[(i, j)] = v;
            sym[(j, i)] = v;
        }
    }
    let counts = sym.data().iter().map(|&x| u64::from(x != 0.0)).collect();
    WeightedDigraph {
        node_ids: g.node_ids.clone(),
        weights: sym,
        counts,
    }
}

pub fn degrees(g: &WeightedDigraph) -> DegreeInfo {
    DegreeInfo {
        out_degrees: g.weights.row_sums(),
    }
}

/// Indices of nodes with zero total weight, in-edges and out-edges combined.
pub fn isolated_nodes(g: &WeightedDigraph) -> Vec<usize> {
    let out = g.weights.row_sums();
    let inc = g.weights.col_sums();
    (0..g.n())
        .filter(|&i| out[i] == 0.0 && inc[i] == 0.0)
        .collect()
}

/// Induced subgraph on the largest connected component (strong components
/// for `directed`, weak otherwise) plus the original indices it keeps.
pub fn largest_connected_component(
    g: &WeightedDigraph,
    directed: bool,
) -> (WeightedDigraph, Vec<usize>) {
    let comps = if directed {
        strongly_connected_components(&g.weights)
    } else {
        weak_components(&g.weights)
    };
    let mut best: &Vec<usize> = &comps[0];
    for c in &comps {
        if c.len() > best.len() || (c.len() == best.len() && c[0] < best[0]) {
            best = c;
        }
    }
    let mut keep = best.clone();
    keep.sort_unstable();
    let n = g.n();
    let sub_ids: Vec<u32> = keep.iter().map(|&i| g.node_ids[i]).collect();
    let sub_w = g.weights.submatrix(&keep);
    let m = keep.len();
    let mut sub_counts = vec![0u64; m * m];
    for (a, &i) in keep.iter().enumerate() {
        for (b, &j) in keep.iter().enumerate() {
            sub_counts[a * m + b] = g.counts[i * n + j];
        }
    }
    (
        WeightedDigraph {
            node_ids: sub_ids,
            weights: sub_w,
            counts: sub_counts,
        },
        keep,
    )
}
