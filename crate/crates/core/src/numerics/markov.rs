//! Random-walk transition matrices, stationary distributions, and the
//! modulus-ordered spectrum used by the random-walk clustering pipeline.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::numerics::general_eig::{eigenvalues, eigenvector_for};

/// One eigenpair of a transition matrix.
#[derive(Debug, Clone)]
pub struct ComplexEigenPair {
    pub value: Complex64,
    pub vector: Vec<Complex64>,
}

/// Stationary distribution π with πᵀP = πᵀ.
#[derive(Debug, Clone)]
pub struct StationaryDistribution {
    pub probabilities: Vec<f64>,
}

const STATIONARY_TOL: f64 = 1e-12;
const STATIONARY_MAX_ITERS: usize = 100_000;

/// Row-stochastic transition matrix P = (1−η)·D⁻¹W + η·(1/n)·J.
///
/// Rows of W with zero sum are an error when η = 0; with η > 0 they walk
/// uniformly, the usual dangling-node convention.
pub fn transition_matrix(w: &DenseMatrix, teleport: f64) -> Result<DenseMatrix> {
    if !w.is_square() {
        return Err(Error::InvalidInput("transition matrix needs square W".into()));
    }
    w.validate_finite()?;
    if !(0.0..1.0).contains(&teleport) {
        return Err(Error::Config(format!(
            "teleport must lie in [0, 1), got {teleport}"
        )));
    }
    if w.data().iter().any(|&x| x < 0.0) {
        return Err(Error::InvalidInput("weight matrix has negative entries".into()));
    }
    let n = w.rows();
    if n == 0 {
        return Err(Error::InvalidInput("empty weight matrix".into()));
    }
    let uniform = 1.0 / n as f64;
    let mut p = DenseMatrix::zeros(n, n);
    for i in 0..n {
        let d: f64 = w.row(i).iter().sum();
        if d <= 0.0 {
            if teleport == 0.0 {
                return Err(Error::SingularDegree { node: i });
            }
            for j in 0..n {
                p[(i, j)] = uniform;
            }
        } else {
            for j in 0..n {
                p[(i, j)] = (1.0 - teleport) * w.get(i, j) / d + teleport * uniform;
            }
        }
        let sum: f64 = p.row(i).iter().sum();
        for j in 0..n {
            p[(i, j)] /= sum;
        }
    }
    Ok(p)
}

fn check_stochastic(p: &DenseMatrix) -> Result<()> {
    if !p.is_square() {
        return Err(Error::InvalidInput("P must be square".into()));
    }
    for i in 0..p.rows() {
        let sum: f64 = p.row(i).iter().sum();
        if (sum - 1.0).abs() > 1e-10 || p.row(i).iter().any(|&x| x < -1e-14) {
            return Err(Error::InvalidInput(format!(
                "P is not row-stochastic at row {i} (sum {sum})"
            )));
        }
    }
    Ok(())
}

/// Stationary distribution by left power iteration from the uniform vector.
///
/// Converges only for irreducible aperiodic chains; callers enforce that via
/// teleport or component extraction.
pub fn stationary(p: &DenseMatrix) -> Result<StationaryDistribution> {
    check_stochastic(p)?;
    let n = p.rows();
    let mut pi = vec![1.0 / n as f64; n];
    for _ in 0..STATIONARY_MAX_ITERS {
        let mut next = p.vecmat(&pi);
        let sum: f64 = next.iter().sum();
        for x in next.iter_mut() {
            *x /= sum;
        }
        let delta: f64 = next.iter().zip(&pi).map(|(a, b)| (a - b).abs()).sum();
        pi = next;
        if delta <= STATIONARY_TOL {
            return Ok(StationaryDistribution { probabilities: pi });
        }
    }
    Err(Error::Convergence(format!(
        "stationary distribution did not converge in {STATIONARY_MAX_ITERS} iterations \
         (chain may be periodic; use teleport)"
    )))
}

/// Eigenvalues sorted by modulus descending, ties by larger real part, then
/// by nonnegative imaginary part first.
pub fn sorted_spectrum(p: &DenseMatrix) -> Result<Vec<Complex64>> {
    let mut vals = eigenvalues(p)?;
    let tol = 1e-12 * vals.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
    vals.sort_by(|a, b| {
        let (na, nb) = (a.norm(), b.norm());
        if (na - nb).abs() > tol {
            return nb.partial_cmp(&na).unwrap();
        }
        if (a.re - b.re).abs() > tol {
            return b.re.partial_cmp(&a.re).unwrap();
        }
        b.im.partial_cmp(&a.im).unwrap()
    });
    Ok(vals)
}

/// The eigenpair at sorted index 1 — "the second eigenvector" of P.
pub fn second_eigenpair(p: &DenseMatrix) -> Result<ComplexEigenPair> {
    check_stochastic(p)?;
    if p.rows() < 2 {
        return Err(Error::InvalidInput(
            "second eigenpair needs at least a 2x2 matrix".into(),
        ));
    }
    let spectrum = sorted_spectrum(p)?;
    let value = spectrum[1];
    let vector = eigenvector_for(p, value)?;
    Ok(ComplexEigenPair { value, vector })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn transition_simple_swap() {
        let w = DenseMatrix::from_rows(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let p = transition_matrix(&w, 0.0).unwrap();
        assert_eq!(p.row(0), &[0.0, 1.0]);
        assert_eq!(p.row(1), &[1.0, 0.0]);
    }

    #[test]
    fn zero_out_degree_is_an_error_without_teleport() {
        let w = DenseMatrix::from_rows(vec![vec![0.0, 2.0], vec![0.0, 0.0]]).unwrap();
        match transition_matrix(&w, 0.0) {
            Err(Error::SingularDegree { node }) => assert_eq!(node, 1),
            other => panic!("expected SingularDegree, got {other:?}"),
        }
        // with teleport the dangling row walks uniformly
        let p = transition_matrix(&w, 0.15).unwrap();
        assert_relative_eq!(p.get(1, 0), 0.5, epsilon = 1e-12);
        assert_relative_eq!(p.get(1, 1), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn three_cycle_is_permutation() {
        let w = DenseMatrix::from_rows(vec![
            vec![0.0, 2.0, 0.0],
            vec![0.0, 0.0, 5.0],
            vec![1.0, 0.0, 0.0],
        ])
        .unwrap();
        let p = transition_matrix(&w, 0.0).unwrap();
        assert_eq!(p.row(0), &[0.0, 1.0, 0.0]);
        assert_eq!(p.row(1), &[0.0, 0.0, 1.0]);
        assert_eq!(p.row(2), &[1.0, 0.0, 0.0]);
    }

    #[test]
    fn rows_sum_to_one_with_teleport() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let w = DenseMatrix::from_fn(6, 6, |_, _| if rng.gen_bool(0.4) { rng.gen_range(0.0..3.0) } else { 0.0 });
        let p = transition_matrix(&w, 0.15).unwrap();
        for i in 0..6 {
            let s: f64 = p.row(i).iter().sum();
            assert!((s - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn stationary_uniform_for_doubly_stochastic() {
        let p = DenseMatrix::from_rows(vec![
            vec![0.5, 0.25, 0.25],
            vec![0.25, 0.5, 0.25],
            vec![0.25, 0.25, 0.5],
        ])
        .unwrap();
        let pi = stationary(&p).unwrap().probabilities;
        for x in pi {
            assert_relative_eq!(x, 1.0 / 3.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn stationary_degree_proportional_for_symmetric_w() {
        // triangle with an extra edge; non-bipartite so the walk mixes
        let w = DenseMatrix::from_rows(vec![
            vec![0.0, 2.0, 1.0, 0.0],
            vec![2.0, 0.0, 1.0, 0.0],
            vec![1.0, 1.0, 0.0, 3.0],
            vec![0.0, 0.0, 3.0, 0.0],
        ])
        .unwrap();
        let p = transition_matrix(&w, 0.0).unwrap();
        let pi = stationary(&p).unwrap().probabilities;
        let d = w.row_sums();
        let total: f64 = d.iter().sum();
        for (x, di) in pi.iter().zip(&d) {
            assert_relative_eq!(*x, di / total, epsilon = 1e-9);
        }
    }

    #[test]
    fn stationary_residual_on_random_strongly_connected() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        // dense positive weights => strongly connected and aperiodic
        let w = DenseMatrix::from_fn(5, 5, |i, j| if i == j { 0.0 } else { rng.gen_range(0.1..2.0) });
        let p = transition_matrix(&w, 0.0).unwrap();
        let pi = stationary(&p).unwrap().probabilities;
        let left = p.vecmat(&pi);
        let resid: f64 = left.iter().zip(&pi).map(|(a, b)| (a - b).abs()).sum();
        assert!(resid <= 1e-10);
    }

    #[test]
    fn periodic_chain_fails_to_converge() {
        // 4-cycle started from a non-stationary vector would oscillate; the
        // uniform start happens to be stationary, so perturb via a 2-node
        // asymmetric periodic chain instead.
        let p = DenseMatrix::from_rows(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        // uniform start is exactly stationary here: converges immediately
        assert!(stationary(&p).is_ok());
        // shifting mass breaks it: emulate with a 3-node periodic chain whose
        // stationary vector is not uniform
        let w = DenseMatrix::from_rows(vec![
            vec![0.0, 2.0, 0.0],
            vec![1.0, 0.0, 1.0],
            vec![0.0, 2.0, 0.0],
        ])
        .unwrap();
        let p = transition_matrix(&w, 0.0).unwrap();
        // bipartite walk: period 2, uniform start is not stationary
        assert!(matches!(stationary(&p), Err(Error::Convergence(_))));
    }

    #[test]
    fn second_pair_of_three_cycle_is_sorted_root_of_unity() {
        let w = DenseMatrix::from_rows(vec![
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
            vec![1.0, 0.0, 0.0],
        ])
        .unwrap();
        let p = transition_matrix(&w, 0.0).unwrap();
        let pair = second_eigenpair(&p).unwrap();
        let expected = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
        assert_relative_eq!(pair.value.re, expected.re, epsilon = 1e-8);
        assert_relative_eq!(pair.value.im, expected.im, epsilon = 1e-8);
        assert!(pair.value.im > 0.0);
        // phase canonicalization: the first largest-modulus component is
        // real positive, and the vector has unit norm
        let max_norm = pair.vector.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let pivot = pair
            .vector
            .iter()
            .find(|z| z.norm() >= max_norm * (1.0 - 1e-12))
            .unwrap();
        assert!(pivot.im.abs() <= 1e-10 && pivot.re > 0.0);
        let norm: f64 = pair.vector.iter().map(|z| z.norm_sqr()).sum();
        assert_relative_eq!(norm, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn stationary_is_entrywise_positive_with_teleport() {
        // weakly linked star fragments; teleport keeps every mass positive
        let mut w = DenseMatrix::zeros(5, 5);
        w[(0, 1)] = 1.0;
        w[(1, 0)] = 1.0;
        w[(2, 3)] = 1.0;
        w[(3, 4)] = 1.0;
        w[(4, 2)] = 1.0;
        let p = transition_matrix(&w, 0.2).unwrap();
        let pi = stationary(&p).unwrap().probabilities;
        assert!(pi.iter().all(|&x| x > 0.0));
        assert_relative_eq!(pi.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn second_pair_splits_disconnected_cliques() {
        let p = DenseMatrix::from_rows(vec![
            vec![0.0, 1.0, 0.0, 0.0],
            vec![1.0, 0.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0, 1.0],
            vec![0.0, 0.0, 1.0, 0.0],
        ])
        .unwrap();
        let pair = second_eigenpair(&p).unwrap();
        assert_relative_eq!(pair.value.norm(), 1.0, epsilon = 1e-8);
        // constant inside each clique, distinct across them
        let v: Vec<f64> = pair.vector.iter().map(|z| z.re + z.im).collect();
        assert!((v[0] - v[1]).abs() <= 1e-8);
        assert!((v[2] - v[3]).abs() <= 1e-8);
        assert!((v[0] - v[2]).abs() > 1e-4);
    }

    #[test]
    fn identity_second_pair_is_degenerate_but_valid() {
        let p = DenseMatrix::identity(3);
        let pair = second_eigenpair(&p).unwrap();
        assert_relative_eq!(pair.value.re, 1.0, epsilon = 1e-10);
        let spectrum = sorted_spectrum(&p).unwrap();
        assert!((spectrum[0].norm() - spectrum[1].norm()).abs() <= 1e-12);
    }
}
