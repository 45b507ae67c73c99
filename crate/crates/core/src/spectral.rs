//! Spectral clustering pipelines: undirected Laplacian embeddings
//! (unnormalized and normalized), the symmetrized directed Laplacian route,
//! SVD latent-position embedding, and random-walk second-eigenvector
//! clustering.
//!
//! Every pipeline removes nodes with no cross-node edges first and marks
//! them with the reserved label in the expanded partition; Laplacian- and
//! transition-matrix-based pipelines also zero self-loops before building
//! their operator.

use num_complex::Complex64;
use statrs::function::erf::erf;

use crate::error::{Error, Result};
use crate::graph::{is_aperiodic, strongly_connected_components};
use crate::matrix::DenseMatrix;
use crate::numerics::{
    eigenvector_for, eigh_symmetric, kmeans, sorted_spectrum, stationary, transition_matrix,
};
use crate::partition::Partition;

/// Teleport probability used when a directed pipeline must repair a graph
/// that is not strongly connected and aperiodic.
pub const AUTO_TELEPORT: f64 = 0.15;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LaplacianVariant {
    Unnormalized,
    Normalized,
}

/// A Laplacian ready for eigendecomposition. For the normalized variant the
/// stored matrix is the symmetric form I − D^{−1/2}WD^{−1/2}; multiplying
/// its eigenvectors by D^{−1/2} recovers eigenvectors of I − D⁻¹W, which
/// shares the spectrum.
#[derive(Debug, Clone)]
pub struct Laplacian {
    pub matrix: DenseMatrix,
    pub variant: LaplacianVariant,
    pub inv_sqrt_degrees: Option<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub struct SpectralConfig {
    pub k: usize,
    pub variant: LaplacianVariant,
    pub seed: u64,
    pub restarts: usize,
}

#[derive(Debug, Clone)]
pub struct CdlConfig {
    pub k: usize,
    pub teleport: f64,
    pub seed: u64,
    pub restarts: usize,
}

/// Latent dimension for the SVD embedding: explicit, or picked from the
/// largest relative gap in the singular values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LatentDim {
    Auto,
    Fixed(usize),
}

#[derive(Debug, Clone)]
pub struct SvdConfig {
    pub k: usize,
    pub latent: LatentDim,
    pub seed: u64,
    pub restarts: usize,
}

#[derive(Debug, Clone)]
pub struct RandWalkConfig {
    pub k: usize,
    pub teleport: f64,
    pub seed: u64,
    pub restarts: usize,
}

/// A pipeline result: the expanded partition plus run metadata the CLI
/// surfaces in its manifest.
#[derive(Debug, Clone)]
pub struct ClusterOutput {
    pub partition: Partition,
    /// Spectrum or kernel degeneracy was detected (result may be arbitrary).
    pub degenerate: bool,
    /// Teleport the pipeline applied on its own to satisfy preconditions.
    pub teleport_applied: Option<f64>,
    /// Latent dimension actually used (SVD pipeline only).
    pub latent_dim: Option<usize>,
}

impl ClusterOutput {
    fn new(partition: Partition) -> Self {
        ClusterOutput {
            partition,
            degenerate: false,
            teleport_applied: None,
            latent_dim: None,
        }
    }
}

/// Graph Laplacian of a symmetric weight matrix with zero diagonal.
pub fn laplacian(wu: &DenseMatrix, variant: LaplacianVariant) -> Result<Laplacian> {
    check_symmetric_weights(wu)?;
    let n = wu.rows();
    match variant {
        LaplacianVariant::Unnormalized => {
            let mut l = wu.scale(-1.0);
            let d = wu.row_sums();
            for i in 0..n {
                l[(i, i)] = d[i];
            }
            Ok(Laplacian {
                matrix: l,
                variant,
                inv_sqrt_degrees: None,
            })
        }
        LaplacianVariant::Normalized => {
            let d = wu.row_sums();
            if let Some(i) = d.iter().position(|&x| x <= 0.0) {
                return Err(Error::InvalidInput(format!(
                    "node {i} has zero degree; the normalized Laplacian is undefined \
                     (drop isolated nodes first)"
                )));
            }
            let inv_sqrt: Vec<f64> = d.iter().map(|&x| 1.0 / x.sqrt()).collect();
            let mut l = DenseMatrix::zeros(n, n);
            for i in 0..n {
                l[(i, i)] = 1.0;
                for j in (i + 1)..n {
                    let v = -wu.get(i, j) * inv_sqrt[i] * inv_sqrt[j];
                    l[(i, j)] = v;
                    l[(j, i)] = v;
                }
            }
            Ok(Laplacian {
                matrix: l,
                variant,
                inv_sqrt_degrees: Some(inv_sqrt),
            })
        }
    }
}

/// Symmetrized directed Laplacian
/// L = I − ½(Π^{1/2} P Π^{−1/2} + Π^{−1/2} Pᵀ Π^{1/2}),
/// with P the (teleported) transition matrix and Π its stationary
/// distribution.
pub fn cdl_laplacian(w: &DenseMatrix, teleport: f64) -> Result<DenseMatrix> {
    let p = transition_matrix(w, teleport)?;
    let pi = stationary(&p)?.probabilities;
    if pi.iter().any(|&x| x <= 0.0) {
        return Err(Error::Numeric(
            "stationary distribution has non-positive entries".into(),
        ));
    }
    let s: Vec<f64> = pi.iter().map(|&x| x.sqrt()).collect();
    let n = w.rows();
    let mut l = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let forward = s[i] * p.get(i, j) / s[j];
            let backward = s[j] * p.get(j, i) / s[i];
            let v = if i == j { 1.0 } else { 0.0 } - 0.5 * (forward + backward);
            l[(i, j)] = v;
            l[(j, i)] = v;
        }
    }
    Ok(l)
}

/// Spectral clustering of a symmetric weight matrix (self-loops ignored).
pub fn spectral_cluster(wu: &DenseMatrix, cfg: &SpectralConfig) -> Result<ClusterOutput> {
    let (work, active, n) = prepare(wu, cfg.k)?;
    check_symmetric_weights(&work)?;
    let lap = laplacian(&work, cfg.variant)?;
    let eig = eigh_symmetric(&lap.matrix)?;
    let mut embedding =
        DenseMatrix::from_fn(active.len(), cfg.k, |i, j| eig.vectors.get(i, j));
    if let Some(inv_sqrt) = &lap.inv_sqrt_degrees {
        for i in 0..active.len() {
            for j in 0..cfg.k {
                embedding[(i, j)] *= inv_sqrt[i];
            }
        }
        renormalize_columns(&mut embedding);
    }
    let km = kmeans(&embedding, cfg.k, cfg.seed, cfg.restarts)?;
    let inner = Partition::from_cluster_indices(&km.labels);
    Ok(ClusterOutput::new(Partition::expand(&inner, &active, n)))
}

/// Directed clustering through the symmetrized directed Laplacian.
///
/// With `teleport == 0` the pipeline checks the strong-connectivity and
/// aperiodicity preconditions itself and, when they fail, retries with
/// [`AUTO_TELEPORT`], reporting that in the output.
pub fn cdl_cluster(w: &DenseMatrix, cfg: &CdlConfig) -> Result<ClusterOutput> {
    let (work, active, n) = prepare(w, cfg.k)?;
    let (eta, applied) = if cfg.teleport > 0.0 {
        (cfg.teleport, None)
    } else if cdl_preconditions_hold(&work) {
        (0.0, None)
    } else {
        (AUTO_TELEPORT, Some(AUTO_TELEPORT))
    };
    let l = cdl_laplacian(&work, eta)?;
    let eig = eigh_symmetric(&l)?;
    let embedding = DenseMatrix::from_fn(active.len(), cfg.k, |i, j| eig.vectors.get(i, j));
    let km = kmeans(&embedding, cfg.k, cfg.seed, cfg.restarts)?;
    let inner = Partition::from_cluster_indices(&km.labels);
    let mut out = ClusterOutput::new(Partition::expand(&inner, &active, n));
    out.teleport_applied = applied;
    Ok(out)
}

fn cdl_preconditions_hold(w: &DenseMatrix) -> bool {
    if w.row_sums().iter().any(|&d| d <= 0.0) {
        return false;
    }
    strongly_connected_components(w).len() == 1 && is_aperiodic(w)
}

/// Latent-position clustering from the SVD of the raw weight matrix.
pub fn svd_cluster(w: &DenseMatrix, cfg: &SvdConfig) -> Result<ClusterOutput> {
    if !w.is_square() {
        return Err(Error::InvalidInput("weight matrix must be square".into()));
    }
    if cfg.k < 2 {
        return Err(Error::Config(format!("k must be at least 2, got {}", cfg.k)));
    }
    // isolated nodes leave, but surviving self-loops stay in the matrix
    let active = cross_active_nodes(w);
    let n = w.rows();
    if active.len() < cfg.k {
        return Err(Error::Config(format!(
            "k = {} exceeds the {} nodes that carry edges",
            cfg.k,
            active.len()
        )));
    }
    let sub = w.submatrix(&active);
    let dec = crate::numerics::svd(&sub)?;
    let m = active.len();
    let d = match cfg.latent {
        LatentDim::Fixed(d) => {
            if d < 1 || d > m {
                return Err(Error::Config(format!(
                    "latent dimension {d} outside 1..={m}"
                )));
            }
            d
        }
        LatentDim::Auto => auto_latent_dim(&dec.singular_values),
    };
    let sqrt_s: Vec<f64> = dec.singular_values[..d].iter().map(|&x| x.sqrt()).collect();
    let z = DenseMatrix::from_fn(m, 2 * d, |i, j| {
        if j < d {
            dec.u.get(i, j) * sqrt_s[j]
        } else {
            dec.v.get(i, j - d) * sqrt_s[j - d]
        }
    });
    let km = kmeans(&z, cfg.k, cfg.seed, cfg.restarts)?;
    let inner = Partition::from_cluster_indices(&km.labels);
    let mut out = ClusterOutput::new(Partition::expand(&inner, &active, n));
    out.latent_dim = Some(d);
    Ok(out)
}

/// Pick the latent dimension at the largest relative gap in the singular
/// values, scanning the first half of the spectrum.
pub fn auto_latent_dim(singular_values: &[f64]) -> usize {
    let n = singular_values.len();
    if n == 0 || singular_values[0] <= 0.0 {
        return 1;
    }
    let s0 = singular_values[0];
    let upper = n.div_ceil(2);
    let mut best_ratio = f64::NEG_INFINITY;
    let mut best_d = 1usize;
    for d in 1..=upper {
        let next = if d < n { singular_values[d] } else { 0.0 };
        let ratio = singular_values[d - 1] / next.max(1e-12 * s0);
        if ratio > best_ratio {
            best_ratio = ratio;
            best_d = d;
        }
    }
    best_d
}

/// Random-walk spectral clustering: second transition-matrix eigenvector,
/// Gaussian-kernel flattening, 1-D k-means.
pub fn randwalk_cluster(w: &DenseMatrix, cfg: &RandWalkConfig) -> Result<ClusterOutput> {
    let (work, active, n) = prepare(w, cfg.k)?;
    let p = transition_matrix(&work, cfg.teleport)?;
    let spectrum = sorted_spectrum(&p)?;
    if spectrum.len() < 2 {
        return Err(Error::InvalidInput("graph too small for a second eigenpair".into()));
    }
    let lambda2 = spectrum[1];
    let degenerate_spectrum = (spectrum[0].norm() - lambda2.norm()).abs() <= 1e-12;
    let u: Vec<Complex64> = eigenvector_for(&p, lambda2)?;
    let v: Vec<f64> = u.iter().map(|z| z.re + z.im).collect();
    let (kernel, kernel_degenerate) = gaussian_kernel(&v);
    let points = DenseMatrix::from_fn(kernel.len(), 1, |i, _| kernel[i]);
    let km = kmeans(&points, cfg.k, cfg.seed, cfg.restarts)?;
    let inner = Partition::from_cluster_indices(&km.labels);
    let mut out = ClusterOutput::new(Partition::expand(&inner, &active, n));
    out.degenerate = degenerate_spectrum || kernel_degenerate;
    Ok(out)
}

/// Map eigenvector components through the Gaussian CDF fitted to their own
/// sample mean and standard deviation: wᵢ = Φ((vᵢ − μ_v)/σ_v).
///
/// The monotone CDF keeps distinct component levels distinct, which is what
/// the downstream 1-D k-means needs. A constant input (σ_v ≈ 0) yields the
/// all-ones vector and the degenerate flag.
pub fn gaussian_kernel(v: &[f64]) -> (Vec<f64>, bool) {
    let m = v.len();
    if m < 2 {
        return (vec![1.0; m], true);
    }
    let mu = v.iter().sum::<f64>() / m as f64;
    let var = v.iter().map(|x| (x - mu) * (x - mu)).sum::<f64>() / (m as f64 - 1.0);
    let sigma = var.sqrt();
    if sigma <= 1e-14 {
        return (vec![1.0; m], true);
    }
    let w = v
        .iter()
        .map(|&x| 0.5 * (1.0 + erf((x - mu) / (sigma * std::f64::consts::SQRT_2))))
        .collect();
    (w, false)
}

/// Drop self-loops, find nodes that carry at least one cross-node edge, and
/// slice the working submatrix.
fn prepare(w: &DenseMatrix, k: usize) -> Result<(DenseMatrix, Vec<usize>, usize)> {
    if !w.is_square() {
        return Err(Error::InvalidInput("weight matrix must be square".into()));
    }
    w.validate_finite()?;
    if k < 2 {
        return Err(Error::Config(format!("k must be at least 2, got {k}")));
    }
    let active = cross_active_nodes(w);
    if active.len() < k {
        return Err(Error::Config(format!(
            "k = {} exceeds the {} nodes that carry edges",
            k,
            active.len()
        )));
    }
    let work = w.submatrix(&active).with_zero_diagonal();
    Ok((work, active, w.rows()))
}

/// Nodes with at least one positive off-diagonal entry in their row or
/// column.
fn cross_active_nodes(w: &DenseMatrix) -> Vec<usize> {
    let n = w.rows();
    (0..n)
        .filter(|&i| {
            (0..n).any(|j| j != i && (w.get(i, j) > 0.0 || w.get(j, i) > 0.0))
        })
        .collect()
}

fn check_symmetric_weights(wu: &DenseMatrix) -> Result<()> {
    if !wu.is_square() {
        return Err(Error::InvalidInput("weight matrix must be square".into()));
    }
    wu.validate_finite()?;
    if wu.max_asymmetry() > 1e-10 * wu.max_abs().max(1e-300) {
        return Err(Error::InvalidInput(
            "weight matrix is not symmetric; symmetrize the graph first".into(),
        ));
    }
    if wu.data().iter().any(|&x| x < 0.0) {
        return Err(Error::InvalidInput("weight matrix has negative entries".into()));
    }
    if (0..wu.rows()).any(|i| wu.get(i, i) != 0.0) {
        return Err(Error::InvalidInput(
            "weight matrix has self-loops; zero the diagonal first".into(),
        ));
    }
    Ok(())
}

fn renormalize_columns(m: &mut DenseMatrix) {
    for j in 0..m.cols() {
        let mut col = m.column(j);
        crate::numerics::normalize_and_fix_sign(&mut col);
        for i in 0..m.rows() {
            m[(i, j)] = col[i];
        }
    }
}
