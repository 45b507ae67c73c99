//! Leiden community detection driven by the constant Potts model
//! H = Σ_c [e_c − γ·C(n_c, 2)].

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::partition::{Partition, UNASSIGNED};

const MOVE_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct LeidenConfig {
    /// Resolution γ; `None` uses the mean off-diagonal weight
    /// Σ_{i<j} W[i][j] / C(n, 2).
    pub gamma: Option<f64>,
    pub max_levels: usize,
    pub seed: u64,
}

impl Default for LeidenConfig {
    fn default() -> Self {
        LeidenConfig {
            gamma: None,
            max_levels: 20,
            seed: 0,
        }
    }
}

/// Constant Potts quality of a partition. `e_c` counts each undirected
/// intra-cluster edge once and includes self-loop weight; the penalty uses
/// the pair count C(n_c, 2), the standard CPM convention. Reserved labels
/// contribute nothing.
pub fn cpm_quality(wu: &DenseMatrix, partition: &Partition, gamma: f64) -> f64 {
    let n = wu.rows();
    let k = partition.k();
    let labels = partition.labels();
    let mut intra = vec![0.0; k];
    let mut sizes = vec![0usize; k];
    for i in 0..n {
        if labels[i] == UNASSIGNED {
            continue;
        }
        let c = labels[i] as usize;
        sizes[c] += 1;
        intra[c] += wu.get(i, i);
        for j in (i + 1)..n {
            if labels[j] == labels[i] {
                intra[c] += wu.get(i, j);
            }
        }
    }
    (0..k)
        .map(|c| intra[c] - gamma * pairs(sizes[c]))
        .sum()
}

fn pairs(n: usize) -> f64 {
    (n as f64) * (n as f64 - 1.0) / 2.0
}

/// Default resolution: mean off-diagonal weight of the input graph.
pub fn default_gamma(wu: &DenseMatrix) -> f64 {
    let n = wu.rows();
    if n < 2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            sum += wu.get(i, j);
        }
    }
    let g = sum / pairs(n);
    if g > 0.0 {
        g
    } else {
        1.0
    }
}

/// One level of the hierarchy: a (possibly aggregated) symmetric graph
/// whose self-loops store intra-super-node weight.
struct Level {
    w: DenseMatrix,
    sizes: Vec<usize>,
    members: Vec<Vec<usize>>,
}

/// Leiden clustering: seeded local moving, deterministic refinement,
/// aggregation, repeated until aggregation changes nothing.
pub fn leiden(wu: &DenseMatrix, cfg: &LeidenConfig) -> Result<Partition> {
    validate_undirected(wu)?;
    let n = wu.rows();
    if n == 0 {
        return Partition::new(vec![], 0);
    }
    let gamma = cfg.gamma.unwrap_or_else(|| default_gamma(wu));
    if gamma <= 0.0 {
        return Err(Error::Config(format!("gamma must be positive, got {gamma}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let mut level = Level {
        w: wu.clone(),
        sizes: vec![1; n],
        members: (0..n).map(|i| vec![i]).collect(),
    };
    let mut comm: Vec<usize> = (0..n).collect(); // singleton start
    let mut last_h = f64::NEG_INFINITY;

    for _ in 0..cfg.max_levels.max(1) {
        local_move(&level, &mut comm, gamma, &mut rng);
        let refined = refine(&level, &comm, gamma);
        let n_ref = 1 + refined.iter().copied().max().unwrap_or(0);

        let h = flat_quality(wu, &level, &comm, gamma, n);
        debug_assert!(
            h >= last_h - 1e-9 * (1.0 + h.abs()),
            "CPM quality decreased across a level: {last_h} -> {h}"
        );
        last_h = h;

        if n_ref == level.w.rows() {
            break; // aggregation would be the identity
        }
        let (next, next_comm) = aggregate(&level, &refined, &comm);
        level = next;
        comm = next_comm;
    }

    let labels = flatten(&level, &comm, n);
    Ok(Partition::from_cluster_indices(&labels).canonicalize())
}

fn validate_undirected(wu: &DenseMatrix) -> Result<()> {
    if !wu.is_square() {
        return Err(Error::InvalidInput("weight matrix must be square".into()));
    }
    wu.validate_finite()?;
    if wu.max_asymmetry() > 1e-10 * wu.max_abs().max(1e-300) {
        return Err(Error::InvalidInput(
            "Leiden needs a symmetric weight matrix".into(),
        ));
    }
    if wu.data().iter().any(|&x| x < 0.0) {
        return Err(Error::InvalidInput("negative edge weight".into()));
    }
    Ok(())
}

/// Move nodes to the neighbouring (or empty) community with the best CPM
/// gain until a full shuffled pass accepts nothing.
fn local_move(level: &Level, comm: &mut [usize], gamma: f64, rng: &mut ChaCha8Rng) {
    let n = level.w.rows();
    let mut size_sum = vec![0usize; n];
    for (v, &c) in comm.iter().enumerate() {
        size_sum[c] += level.sizes[v];
    }
    let mut order: Vec<usize> = (0..n).collect();
    loop {
        order.shuffle(rng);
        let mut moved_any = false;
        for &v in &order {
            let current = comm[v];
            let sv = level.sizes[v] as f64;
            // weight from v to each community (self-loop excluded)
            let mut acc = vec![0.0; n];
            for u in 0..n {
                if u != v {
                    let w = level.w.get(v, u);
                    if w > 0.0 {
                        acc[comm[u]] += w;
                    }
                }
            }
            let stay = acc[current] - gamma * sv * (size_sum[current] - level.sizes[v]) as f64;
            // candidates: neighbouring communities and one empty community
            let mut best_value = 0.0; // empty target
            let mut best_target = None; // None = fresh empty community
            for c in 0..n {
                if c == current || acc[c] <= 0.0 {
                    continue;
                }
                let value = acc[c] - gamma * sv * size_sum[c] as f64;
                if value > best_value {
                    best_value = value;
                    best_target = Some(c);
                }
            }
            if best_value - stay > MOVE_TOL {
                let dest = match best_target {
                    Some(c) => c,
                    None => (0..n)
                        .find(|&c| size_sum[c] == 0)
                        .expect("an empty community id is always available"),
                };
                size_sum[current] -= level.sizes[v];
                size_sum[dest] += level.sizes[v];
                comm[v] = dest;
                moved_any = true;
            }
        }
        if !moved_any {
            break;
        }
    }
}

/// Split each community into connected sub-communities: nodes still alone
/// greedily join the best neighbouring sub-community inside their own
/// community. Returns compact sub-community ids.
fn refine(level: &Level, comm: &[usize], gamma: f64) -> Vec<usize> {
    let n = level.w.rows();
    let mut sub: Vec<usize> = (0..n).collect();
    let mut sub_size: Vec<usize> = level.sizes.clone();
    let mut sub_pop: Vec<usize> = vec![1; n]; // node count per sub-community
    loop {
        let mut changed = false;
        for v in 0..n {
            if sub_pop[sub[v]] != 1 {
                continue; // only lone nodes move, so sub-communities stay connected
            }
            let sv = level.sizes[v] as f64;
            let mut acc = vec![0.0; n];
            for u in 0..n {
                if u != v && comm[u] == comm[v] {
                    let w = level.w.get(v, u);
                    if w > 0.0 {
                        acc[sub[u]] += w;
                    }
                }
            }
            let mut best_gain = MOVE_TOL;
            let mut best = None;
            for s in 0..n {
                if s == sub[v] || acc[s] <= 0.0 {
                    continue;
                }
                let gain = acc[s] - gamma * sv * sub_size[s] as f64;
                if gain > best_gain {
                    best_gain = gain;
                    best = Some(s);
                }
            }
            if let Some(dest) = best {
                sub_pop[sub[v]] -= 1;
                sub_size[sub[v]] -= level.sizes[v];
                sub[v] = dest;
                sub_pop[dest] += 1;
                sub_size[dest] += level.sizes[v];
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    compact(&sub)
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

/// Collapse refined sub-communities into super-nodes; the next level's
/// communities start from the current move-phase communities.
fn aggregate(level: &Level, refined: &[usize], comm: &[usize]) -> (Level, Vec<usize>) {
    let n = level.w.rows();
    let m = 1 + refined.iter().copied().max().unwrap();
    let mut w = DenseMatrix::zeros(m, m);
    for i in 0..n {
        // self-loop first: intra weight of the super-node
        w[(refined[i], refined[i])] += level.w.get(i, i);
        for j in (i + 1)..n {
            let x = level.w.get(i, j);
            if x == 0.0 {
                continue;
            }
            let (a, b) = (refined[i], refined[j]);
            if a == b {
                w[(a, a)] += x;
            } else {
                w[(a, b)] += x;
                w[(b, a)] += x;
            }
        }
    }
    let mut sizes = vec![0usize; m];
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); m];
    let mut next_comm = vec![0usize; m];
    for v in 0..n {
        let a = refined[v];
        sizes[a] += level.sizes[v];
        members[a].extend(level.members[v].iter().copied());
        next_comm[a] = comm[v]; // uniform within a sub-community
    }
    (
        Level { w, sizes, members },
        compact(&next_comm),
    )
}

fn flatten(level: &Level, comm: &[usize], n: usize) -> Vec<usize> {
    let mut labels = vec![0usize; n];
    for (v, members) in level.members.iter().enumerate() {
        for &orig in members {
            labels[orig] = comm[v];
        }
    }
    labels
}

fn flat_quality(wu: &DenseMatrix, level: &Level, comm: &[usize], gamma: f64, n: usize) -> f64 {
    let labels = flatten(level, comm, n);
    let p = Partition::from_cluster_indices(&labels);
    cpm_quality(wu, &p, gamma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn two_triangles() -> DenseMatrix {
        let mut w = DenseMatrix::zeros(6, 6);
        for (i, j) in [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)] {
            w[(i, j)] = 1.0;
            w[(j, i)] = 1.0;
        }
        w
    }

    /// All set partitions of 0..n as restricted-growth label vectors.
    fn all_partitions(n: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut labels = vec![0usize; n];
        fn rec(i: usize, max: usize, labels: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if i == labels.len() {
                out.push(labels.clone());
                return;
            }
            for l in 0..=max + 1 {
                labels[i] = l;
                rec(i + 1, max.max(l), labels, out);
            }
        }
        if n > 0 {
            rec(1, 0, &mut labels, &mut out);
        }
        out
    }

    #[test]
    fn cpm_hand_values() {
        let w = two_triangles();
        let singletons = Partition::from_cluster_indices(&[0, 1, 2, 3, 4, 5]);
        assert_relative_eq!(cpm_quality(&w, &singletons, 1.0), 0.0);
        let one = Partition::from_cluster_indices(&[0; 6]);
        assert_relative_eq!(cpm_quality(&w, &one, 0.0), 6.0); // total edge weight
        // triangle with unit weights, one cluster, gamma=1: 3 - C(3,2) = 0
        let tri = DenseMatrix::from_rows(vec![
            vec![0.0, 1.0, 1.0],
            vec![1.0, 0.0, 1.0],
            vec![1.0, 1.0, 0.0],
        ])
        .unwrap();
        let all = Partition::from_cluster_indices(&[0, 0, 0]);
        assert_relative_eq!(cpm_quality(&tri, &all, 1.0), 0.0);
    }

    #[test]
    fn recovers_two_triangles_and_attains_global_optimum() {
        let w = two_triangles();
        let p = leiden(&w, &LeidenConfig::default()).unwrap();
        assert_eq!(p.labels()[0], p.labels()[1]);
        assert_eq!(p.labels()[0], p.labels()[2]);
        assert_eq!(p.labels()[3], p.labels()[4]);
        assert_eq!(p.labels()[3], p.labels()[5]);
        assert_ne!(p.labels()[0], p.labels()[3]);

        // exhaustive check: no partition of the 6 nodes scores higher
        let gamma = default_gamma(&w);
        let ours = cpm_quality(&w, &p, gamma);
        for labels in all_partitions(6) {
            let cand = Partition::from_cluster_indices(&labels);
            assert!(cpm_quality(&w, &cand, gamma) <= ours + 1e-12);
        }
    }

    #[test]
    fn huge_gamma_keeps_singletons() {
        let w = two_triangles();
        let cfg = LeidenConfig {
            gamma: Some(10.0),
            ..LeidenConfig::default()
        };
        let p = leiden(&w, &cfg).unwrap();
        assert_eq!(p.occupied_clusters(), 6);
    }

    #[test]
    fn output_is_single_move_optimal() {
        let mut w = two_triangles();
        w[(2, 3)] = 0.5;
        w[(3, 2)] = 0.5;
        let cfg = LeidenConfig::default();
        let gamma = default_gamma(&w);
        let p = leiden(&w, &cfg).unwrap();
        let base = cpm_quality(&w, &p, gamma);
        let k = p.k();
        for v in 0..6 {
            for target in 0..=k {
                // move v to every other cluster, including a fresh singleton
                let mut labels: Vec<usize> =
                    p.labels().iter().map(|&l| l as usize).collect();
                if labels[v] == target {
                    continue;
                }
                labels[v] = target;
                let cand = Partition::from_cluster_indices(&labels);
                assert!(
                    cpm_quality(&w, &cand, gamma) <= base + 1e-12,
                    "single move improved H"
                );
            }
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let mut w = two_triangles();
        w[(1, 4)] = 0.4;
        w[(4, 1)] = 0.4;
        let cfg = LeidenConfig { seed: 42, ..LeidenConfig::default() };
        assert_eq!(leiden(&w, &cfg).unwrap(), leiden(&w, &cfg).unwrap());
    }

    #[test]
    fn quality_never_below_singleton_start() {
        let mut w = two_triangles();
        w[(0, 3)] = 0.2;
        w[(3, 0)] = 0.2;
        let gamma = default_gamma(&w);
        let p = leiden(&w, &LeidenConfig::default()).unwrap();
        let singletons = Partition::from_cluster_indices(&[0, 1, 2, 3, 4, 5]);
        assert!(cpm_quality(&w, &p, gamma) >= cpm_quality(&w, &singletons, gamma));
    }

    #[test]
    fn rejects_asymmetric_input() {
        let w = DenseMatrix::from_rows(vec![vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        assert!(leiden(&w, &LeidenConfig::default()).is_err());
    }
}
