//! Symmetric eigendecomposition via cyclic Jacobi rotations.

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

/// Full spectrum of a symmetric matrix.
///
/// `values` are ascending; column `j` of `vectors` is the unit-norm
/// eigenvector for `values[j]`, sign-fixed so its first significant
/// component is positive.
#[derive(Debug, Clone)]
pub struct EigenPairs {
    pub values: Vec<f64>,
    pub vectors: DenseMatrix,
}

const MAX_SWEEPS: usize = 60;
const SYMMETRY_RTOL: f64 = 1e-10;

/// Eigendecomposition of a symmetric matrix.
///
/// Rejects matrices whose asymmetry exceeds `1e-10 * max|A|`.
pub fn eigh_symmetric(a: &DenseMatrix) -> Result<EigenPairs> {
    if !a.is_square() {
        return Err(Error::InvalidInput("eigh needs a square matrix".into()));
    }
    a.validate_finite()?;
    let scale = a.max_abs();
    if a.max_asymmetry() > SYMMETRY_RTOL * scale.max(1e-300) {
        return Err(Error::InvalidInput(format!(
            "matrix is not symmetric: max asymmetry {:.3e} exceeds {:.3e}",
            a.max_asymmetry(),
            SYMMETRY_RTOL * scale
        )));
    }

    let n = a.rows();
    let mut m = a.clone();
    // Work on the exactly symmetric average to keep rotations consistent.
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (m.get(i, j) + m.get(j, i));
            m[(i, j)] = avg;
            m[(j, i)] = avg;
        }
    }
    let mut v = DenseMatrix::identity(n);

    let fro = m.frobenius_norm();
    let stop = 1e-14 * fro.max(1e-300);

    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                off += m.get(i, j) * m.get(i, j);
            }
        }
        if (2.0 * off).sqrt() <= stop {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m.get(p, q);
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let app = m.get(p, p);
                let aqq = m.get(q, q);
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                for k in 0..n {
                    let mkp = m.get(k, p);
                    let mkq = m.get(k, q);
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m.get(p, k);
                    let mqk = m.get(q, k);
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m.get(i, i).partial_cmp(&m.get(j, j)).unwrap());

    let values: Vec<f64> = order.iter().map(|&i| m.get(i, i)).collect();
    let mut vectors = DenseMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = v.column(src);
        normalize_and_fix_sign(&mut col);
        for i in 0..n {
            vectors[(i, dst)] = col[i];
        }
    }

    Ok(EigenPairs { values, vectors })
}

/// Scale to unit 2-norm and make the first significant component positive.
pub(crate) fn normalize_and_fix_sign(col: &mut [f64]) {
    let norm = col.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        for x in col.iter_mut() {
            *x /= norm;
        }
    }
    if let Some(first) = col.iter().find(|x| x.abs() > 1e-12) {
        if *first < 0.0 {
            for x in col.iter_mut() {
                *x = -*x;
            }
        }
    }
}
