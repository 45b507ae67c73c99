//! Singular value decomposition via one-sided Jacobi orthogonalization.

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::numerics::eigh::normalize_and_fix_sign;

/// A = U · diag(S) · Vᵀ with U, V square orthogonal and S descending.
#[derive(Debug, Clone)]
pub struct SvdResult {
    pub u: DenseMatrix,
    pub singular_values: Vec<f64>,
    pub v: DenseMatrix,
}

const MAX_SWEEPS: usize = 60;

/// SVD of a square matrix.
pub fn svd(a: &DenseMatrix) -> Result<SvdResult> {
    if !a.is_square() {
        return Err(Error::InvalidInput("svd needs a square matrix".into()));
    }
    a.validate_finite()?;
    let n = a.rows();
    if n == 0 {
        return Ok(SvdResult {
            u: DenseMatrix::zeros(0, 0),
            singular_values: vec![],
            v: DenseMatrix::zeros(0, 0),
        });
    }

    // Orthogonalize the columns of B = A·(rotations); then B = U·diag(S).
    let mut b = a.clone();
    let mut v = DenseMatrix::identity(n);
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = 0.0;
                for i in 0..n {
                    let bp = b.get(i, p);
                    let bq = b.get(i, q);
                    alpha += bp * bp;
                    beta += bq * bq;
                    gamma += bp * bq;
                }
                if gamma.abs() <= 1e-15 * (alpha * beta).sqrt().max(1e-300) {
                    continue;
                }
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
                } else {
                    -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..n {
                    let bp = b.get(i, p);
                    let bq = b.get(i, q);
                    b[(i, p)] = c * bp - s * bq;
                    b[(i, q)] = s * bp + c * bq;
                    let vp = v.get(i, p);
                    let vq = v.get(i, q);
                    v[(i, p)] = c * vp - s * vq;
                    v[(i, q)] = s * vp + c * vq;
                }
                rotated = true;
            }
        }
        if !rotated {
            break;
        }
    }

    // Singular values and descending order.
    let mut norms: Vec<f64> = (0..n)
        .map(|j| (0..n).map(|i| b.get(i, j).powi(2)).sum::<f64>().sqrt())
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap());
    let mut bs = DenseMatrix::zeros(n, n);
    let mut vs = DenseMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        for i in 0..n {
            bs[(i, dst)] = b.get(i, src);
            vs[(i, dst)] = v.get(i, src);
        }
    }
    norms.sort_by(|x, y| y.partial_cmp(x).unwrap());

    // U columns: normalized B columns where the singular value is
    // significant, Gram-Schmidt completion over the standard basis elsewhere.
    let s_max = norms[0];
    let rank_tol = 1e-13 * s_max.max(1e-300);
    let mut u = DenseMatrix::zeros(n, n);
    let mut filled = vec![false; n];
    for j in 0..n {
        if norms[j] > rank_tol {
            for i in 0..n {
                u[(i, j)] = bs.get(i, j) / norms[j];
            }
            filled[j] = true;
        } else {
            norms[j] = norms[j].max(0.0);
        }
    }
    complete_orthonormal(&mut u, &filled);

    // Joint sign rule: flip (u_j, v_j) together so the first significant
    // component of u_j is positive; lone columns (zero singular value)
    // are fixed independently.
    for j in 0..n {
        let col = u.column(j);
        if let Some(first) = col.iter().find(|x| x.abs() > 1e-12) {
            if *first < 0.0 {
                for i in 0..n {
                    u[(i, j)] = -u.get(i, j);
                    if filled[j] {
                        vs[(i, j)] = -vs.get(i, j);
                    }
                }
            }
        }
        if !filled[j] {
            let mut vcol = vs.column(j);
            normalize_and_fix_sign(&mut vcol);
            for i in 0..n {
                vs[(i, j)] = vcol[i];
            }
        }
    }

    Ok(SvdResult {
        u,
        singular_values: norms,
        v: vs,
    })
}

/// Fill the unfilled columns of `u` with an orthonormal completion drawn
/// from the standard basis.
fn complete_orthonormal(u: &mut DenseMatrix, filled: &[bool]) {
    let n = u.rows();
    let mut basis: Vec<Vec<f64>> = (0..n)
        .filter(|&j| filled[j])
        .map(|j| u.column(j))
        .collect();
    let mut next = 0usize;
    for j in 0..n {
        if filled[j] {
            continue;
        }
        loop {
            assert!(next < n, "failed to complete orthonormal basis");
            let mut cand = vec![0.0; n];
            cand[next] = 1.0;
            next += 1;
            for b in &basis {
                let dot: f64 = cand.iter().zip(b).map(|(x, y)| x * y).sum();
                for (c, bv) in cand.iter_mut().zip(b) {
                    *c -= dot * bv;
                }
            }
            let norm = cand.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-6 {
                for c in cand.iter_mut() {
                    *c /= norm;
                }
                for (i, &x) in cand.iter().enumerate() {
                    u[(i, j)] = x;
                }
                basis.push(cand);
                break;
            }
        }
    }
}
