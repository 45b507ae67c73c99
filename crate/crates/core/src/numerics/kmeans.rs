//! Lloyd's k-means with k-means++ seeding, restarts, and empty-cluster repair.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

/// Outcome of a k-means run: the best of all restarts by inertia.
#[derive(Debug, Clone)]
pub struct KmeansResult {
    pub labels: Vec<usize>,
    pub inertia: f64,
    /// Inertia recorded after every assignment step of the winning restart.
    pub inertia_history: Vec<f64>,
}

const MAX_LLOYD_ITERS: usize = 300;

/// Cluster the rows of `points` into `k` groups.
///
/// Deterministic for a fixed `(points, k, seed, restarts)`.
pub fn kmeans(points: &DenseMatrix, k: usize, seed: u64, restarts: usize) -> Result<KmeansResult> {
    let m = points.rows();
    if k < 1 {
        return Err(Error::Config("k must be at least 1".into()));
    }
    if k > m {
        return Err(Error::Config(format!(
            "k = {k} exceeds the number of points ({m})"
        )));
    }
    points.validate_finite()?;
    let restarts = restarts.max(1);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<KmeansResult> = None;
    for _ in 0..restarts {
        let run = lloyd(points, k, &mut rng);
        if best.as_ref().is_none_or(|b| run.inertia < b.inertia) {
            best = Some(run);
        }
    }
    Ok(best.unwrap())
}

fn lloyd(points: &DenseMatrix, k: usize, rng: &mut ChaCha8Rng) -> KmeansResult {
    let m = points.rows();
    let dim = points.cols();
    let mut centroids = kmeans_pp(points, k, rng);

    let mut labels = vec![0usize; m];
    assign(points, &centroids, &mut labels);
    let mut history = vec![inertia_of(points, &centroids, &labels)];

    for _ in 0..MAX_LLOYD_ITERS {
        // centroid update from current assignments
        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (i, &c) in labels.iter().enumerate() {
            counts[c] += 1;
            for (s, &x) in sums[c].iter_mut().zip(points.row(i)) {
                *s += x;
            }
        }
        let mut reseeded = vec![false; m];
        for c in 0..k {
            if counts[c] == 0 {
                // reseed at the point farthest from its own centroid
                let far = farthest_point(points, &centroids, &labels, &reseeded);
                reseeded[far] = true;
                centroids[c] = points.row(far).to_vec();
            } else {
                for (dst, s) in centroids[c].iter_mut().zip(&sums[c]) {
                    *dst = s / counts[c] as f64;
                }
            }
        }

        let mut new_labels = labels.clone();
        assign(points, &centroids, &mut new_labels);
        let inertia = inertia_of(points, &centroids, &new_labels);
        debug_assert!(
            inertia <= history.last().unwrap() * (1.0 + 1e-12) + 1e-12,
            "inertia increased across a Lloyd iteration"
        );
        history.push(inertia);
        let stable = new_labels == labels;
        labels = new_labels;
        if stable {
            break;
        }
    }

    KmeansResult {
        labels,
        inertia: *history.last().unwrap(),
        inertia_history: history,
    }
}

fn kmeans_pp(points: &DenseMatrix, k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let m = points.rows();
    let first = rng.gen_range(0..m);
    let mut centroids = vec![points.row(first).to_vec()];
    let mut d2: Vec<f64> = (0..m)
        .map(|i| dist_sq(points.row(i), &centroids[0]))
        .collect();
    while centroids.len() < k {
        let total: f64 = d2.iter().sum();
        let pick = if total <= 0.0 {
            rng.gen_range(0..m)
        } else {
            let target = rng.gen::<f64>() * total;
            let mut acc = 0.0;
            let mut chosen = m - 1;
            for (i, &w) in d2.iter().enumerate() {
                acc += w;
                if acc >= target {
                    chosen = i;
                    break;
                }
            }
            chosen
        };
        let c = points.row(pick).to_vec();
        for (i, slot) in d2.iter_mut().enumerate() {
            let d = dist_sq(points.row(i), &c);
            if d < *slot {
                *slot = d;
            }
        }
        centroids.push(c);
    }
    centroids
}

fn assign(points: &DenseMatrix, centroids: &[Vec<f64>], labels: &mut [usize]) {
    for (i, label) in labels.iter_mut().enumerate() {
        let row = points.row(i);
        let mut best = 0usize;
        let mut best_d = f64::INFINITY;
        for (c, centroid) in centroids.iter().enumerate() {
            let d = dist_sq(row, centroid);
            if d < best_d {
                best_d = d;
                best = c;
            }
        }
        *label = best;
    }
}

fn inertia_of(points: &DenseMatrix, centroids: &[Vec<f64>], labels: &[usize]) -> f64 {
    (0..points.rows())
        .map(|i| dist_sq(points.row(i), &centroids[labels[i]]))
        .sum()
}

fn farthest_point(
    points: &DenseMatrix,
    centroids: &[Vec<f64>],
    labels: &[usize],
    taken: &[bool],
) -> usize {
    let mut best = 0usize;
    let mut best_d = -1.0;
    for i in 0..points.rows() {
        if taken[i] {
            continue;
        }
        let d = dist_sq(points.row(i), &centroids[labels[i]]);
        if d > best_d {
            best_d = d;
            best = i;
        }
    }
    best
}

#[inline]
fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}
