//! Walktrap: agglomerative clustering driven by t-step random-walk
//! probability profiles.

use crate::community::modularity;
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::partition::Partition;

#[derive(Debug, Clone)]
pub struct WalktrapConfig {
    /// Random-walk length.
    pub t: usize,
    /// Target cluster count; `None` cuts at the modularity maximum.
    pub k: Option<usize>,
}

impl Default for WalktrapConfig {
    fn default() -> Self {
        WalktrapConfig { t: 4, k: None }
    }
}

/// One agglomeration step: clusters `a` and `b` merged at cost `delta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Merge {
    pub a: usize,
    pub b: usize,
    pub delta: f64,
}

/// Merge history. Leaves are `0..n_leaves`; the merge at position `s`
/// creates cluster `n_leaves + s`.
#[derive(Debug, Clone)]
pub struct Dendrogram {
    pub n_leaves: usize,
    pub merges: Vec<Merge>,
}

/// Random-walk distance between two nodes:
/// r_ij = sqrt(Σ_k (Pᵗ_ik − Pᵗ_jk)² / d_k).
pub fn walktrap_distance(wu: &DenseMatrix, t: usize, i: usize, j: usize) -> Result<f64> {
    validate(wu, t)?;
    let n = wu.rows();
    if i >= n || j >= n {
        return Err(Error::InvalidInput(format!("node index out of range ({i}, {j})")));
    }
    let degrees = wu.row_sums();
    if let Some(v) = degrees.iter().position(|&d| d <= 0.0) {
        return Err(Error::InvalidInput(format!(
            "node {v} is isolated; walk distances are undefined"
        )));
    }
    let pt = walk_matrix(wu, &degrees, t);
    Ok(profile_distance(pt.row(i), pt.row(j), &degrees).sqrt())
}

/// Agglomerative Walktrap. Disconnected graphs are handled naturally: only
/// adjacent clusters merge, so each component agglomerates on its own and
/// the result has one cluster per component at the root.
pub fn walktrap(wu: &DenseMatrix, cfg: &WalktrapConfig) -> Result<(Partition, Dendrogram)> {
    validate(wu, cfg.t)?;
    let work = wu.with_zero_diagonal();
    let n = work.rows();
    if n == 0 {
        return Ok((
            Partition::new(vec![], 0)?,
            Dendrogram { n_leaves: 0, merges: vec![] },
        ));
    }
    if let Some(k) = cfg.k {
        if k < 1 || k > n {
            return Err(Error::Config(format!("k = {k} outside 1..={n}")));
        }
    }
    let degrees = work.row_sums();
    let pt = walk_matrix(&work, &degrees, cfg.t);

    // cluster slots: 0..n leaves, merged clusters appended
    let capacity = 2 * n;
    let mut alive = vec![false; capacity];
    let mut size = vec![0usize; capacity];
    let mut centroid: Vec<Vec<f64>> = vec![Vec::new(); capacity];
    let mut adjacent = vec![false; capacity * capacity];
    let mut node_slot: Vec<usize> = (0..n).collect();
    for i in 0..n {
        alive[i] = true;
        size[i] = 1;
        centroid[i] = pt.row(i).to_vec();
    }
    for i in 0..n {
        for j in 0..n {
            if i != j && work.get(i, j) > 0.0 {
                adjacent[i * capacity + j] = true;
            }
        }
    }

    let mut delta = vec![f64::INFINITY; capacity * capacity];
    let pair_delta = |size: &[usize], centroid: &[Vec<f64>], a: usize, b: usize| -> f64 {
        let (sa, sb) = (size[a] as f64, size[b] as f64);
        sa * sb / (sa + sb) * profile_distance(&centroid[a], &centroid[b], &degrees) / n as f64
    };
    for i in 0..n {
        for j in (i + 1)..n {
            if adjacent[i * capacity + j] {
                let d = pair_delta(&size, &centroid, i, j);
                delta[i * capacity + j] = d;
            }
        }
    }

    let mut merges: Vec<Merge> = Vec::new();
    let mut snapshots: Vec<Vec<usize>> = vec![node_slot.clone()];
    let mut live_slots: Vec<usize> = (0..n).collect();

    loop {
        // adjacent alive pair with minimal merge cost
        let mut best: Option<(f64, usize, usize)> = None;
        for (ai, &a) in live_slots.iter().enumerate() {
            for &b in &live_slots[ai + 1..] {
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                if !adjacent[lo * capacity + hi] {
                    continue;
                }
                let d = delta[lo * capacity + hi];
                if best.is_none_or(|(bd, ba, bb)| {
                    d < bd || (d == bd && (lo, hi) < (ba, bb))
                }) {
                    best = Some((d, lo, hi));
                }
            }
        }
        let Some((d, a, b)) = best else { break };

        let slot = n + merges.len();
        alive[a] = false;
        alive[b] = false;
        alive[slot] = true;
        size[slot] = size[a] + size[b];
        let (sa, sb) = (size[a] as f64, size[b] as f64);
        centroid[slot] = centroid[a]
            .iter()
            .zip(&centroid[b])
            .map(|(x, y)| (sa * x + sb * y) / (sa + sb))
            .collect();
        live_slots.retain(|&s| s != a && s != b);
        for &other in &live_slots {
            let merged_adj = adjacent[a.min(other) * capacity + a.max(other)]
                || adjacent[b.min(other) * capacity + b.max(other)];
            if merged_adj {
                let (lo, hi) = (other.min(slot), other.max(slot));
                adjacent[lo * capacity + hi] = true;
                delta[lo * capacity + hi] = pair_delta(&size, &centroid, other, slot);
            }
        }
        live_slots.push(slot);
        for s in node_slot.iter_mut() {
            if *s == a || *s == b {
                *s = slot;
            }
        }
        merges.push(Merge { a, b, delta: d });
        snapshots.push(node_slot.clone());
    }

    let chosen = match cfg.k {
        Some(k) => {
            // snapshot m has n - m clusters; unreachable k (below the
            // component count) falls back to the final state
            let needed = n.saturating_sub(k);
            snapshots.get(needed).unwrap_or_else(|| snapshots.last().unwrap())
        }
        None => snapshots
            .iter()
            .max_by(|x, y| {
                let qx = modularity(&work, &compact(x));
                let qy = modularity(&work, &compact(y));
                qx.partial_cmp(&qy).unwrap()
            })
            .unwrap(),
    };
    let partition = Partition::from_cluster_indices(&compact(chosen));
    Ok((partition, Dendrogram { n_leaves: n, merges }))
}

fn validate(wu: &DenseMatrix, t: usize) -> Result<()> {
    if !wu.is_square() {
        return Err(Error::InvalidInput("weight matrix must be square".into()));
    }
    wu.validate_finite()?;
    if wu.max_asymmetry() > 1e-10 * wu.max_abs().max(1e-300) {
        return Err(Error::InvalidInput(
            "Walktrap needs a symmetric weight matrix".into(),
        ));
    }
    if wu.data().iter().any(|&x| x < 0.0) {
        return Err(Error::InvalidInput("negative edge weight".into()));
    }
    if t < 1 {
        return Err(Error::Config("walk length must be at least 1".into()));
    }
    Ok(())
}

/// Pᵗ rows; isolated nodes walk in place so their profile stays e_i.
fn walk_matrix(wu: &DenseMatrix, degrees: &[f64], t: usize) -> DenseMatrix {
    let n = wu.rows();
    let p = DenseMatrix::from_fn(n, n, |i, j| {
        if degrees[i] > 0.0 {
            wu.get(i, j) / degrees[i]
        } else {
            f64::from(u8::from(i == j))
        }
    });
    let mut pt = p.clone();
    for _ in 1..t {
        pt = pt.matmul(&p);
    }
    pt
}

/// Σ_k (x_k − y_k)²/d_k over nodes with positive degree.
fn profile_distance(x: &[f64], y: &[f64], degrees: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .zip(degrees)
        .filter(|&(_, &d)| d > 0.0)
        .map(|((a, b), &d)| (a - b) * (a - b) / d)
        .sum()
}

fn compact(ids: &[usize]) -> Vec<usize> {
    let mut map = std::collections::HashMap::new();
    let mut next = 0usize;
    ids.iter()
        .map(|&id| {
            *map.entry(id).or_insert_with(|| {
                let v = next;
                next += 1;
                v
            })
        })
        .collect()
}
