//! Eigenvalues of a general real square matrix via Hessenberg reduction and
//! complex shifted QR, plus inverse iteration for individual eigenvectors.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

const EPS: f64 = f64::EPSILON;
const MAX_ITERS_PER_EIG: usize = 60;

/// All eigenvalues of a real square matrix, in no particular order.
pub fn eigenvalues(a: &DenseMatrix) -> Result<Vec<Complex64>> {
    if !a.is_square() {
        return Err(Error::InvalidInput("eigenvalues need a square matrix".into()));
    }
    a.validate_finite()?;
    let n = a.rows();
    if n == 0 {
        return Ok(vec![]);
    }
    let hess = hessenberg(a);
    let mut h: Vec<Complex64> = hess.data().iter().map(|&x| Complex64::new(x, 0.0)).collect();
    qr_triangularize(&mut h, n)?;
    Ok((0..n).map(|i| h[i * n + i]).collect())
}

/// Householder reduction to upper Hessenberg form (same spectrum).
fn hessenberg(a: &DenseMatrix) -> DenseMatrix {
    let n = a.rows();
    let mut m = a.clone();
    if n < 3 {
        return m;
    }
    for k in 0..n - 2 {
        let norm_x: f64 = (k + 1..n).map(|i| m.get(i, k).powi(2)).sum::<f64>().sqrt();
        if norm_x <= 1e-300 {
            continue;
        }
        let x0 = m.get(k + 1, k);
        let alpha = if x0 >= 0.0 { -norm_x } else { norm_x };
        let mut v: Vec<f64> = (k + 1..n).map(|i| m.get(i, k)).collect();
        v[0] -= alpha;
        let vnorm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if vnorm <= 1e-300 {
            continue;
        }
        for x in v.iter_mut() {
            *x /= vnorm;
        }
        // A ← (I − 2vvᵀ) A, rows k+1.., all columns
        for j in k..n {
            let dot: f64 = v.iter().enumerate().map(|(i, &vi)| vi * m.get(k + 1 + i, j)).sum();
            for (i, &vi) in v.iter().enumerate() {
                m[(k + 1 + i, j)] -= 2.0 * vi * dot;
            }
        }
        // A ← A (I − 2vvᵀ), columns k+1.., all rows
        for i in 0..n {
            let dot: f64 = v.iter().enumerate().map(|(j, &vj)| vj * m.get(i, k + 1 + j)).sum();
            for (j, &vj) in v.iter().enumerate() {
                m[(i, k + 1 + j)] -= 2.0 * vj * dot;
            }
        }
    }
    // zero out the noise below the subdiagonal
    for i in 2..n {
        for j in 0..i - 1 {
            m[(i, j)] = 0.0;
        }
    }
    m
}

/// Shifted complex QR with deflation; leaves eigenvalues on the diagonal.
fn qr_triangularize(h: &mut [Complex64], n: usize) -> Result<()> {
    let idx = |i: usize, j: usize| i * n + j;
    let scale: f64 = h.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
    let mut hi = n; // active block ends at hi-1
    let mut its = 0usize;
    let mut total = 0usize;

    while hi > 0 {
        if total > MAX_ITERS_PER_EIG * n {
            return Err(Error::Convergence("QR iteration exceeded its budget".into()));
        }
        if hi == 1 {
            hi = 0;
            continue;
        }
        // find the start of the irreducible trailing block
        let mut lo = hi - 1;
        while lo > 0 {
            let s = h[idx(lo - 1, lo - 1)].norm() + h[idx(lo, lo)].norm();
            if h[idx(lo, lo - 1)].norm() <= EPS * s.max(EPS * scale) {
                h[idx(lo, lo - 1)] = Complex64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        if lo == hi - 1 {
            // 1x1 block deflated
            hi -= 1;
            its = 0;
            continue;
        }
        if lo == hi - 2 {
            // 2x2 block: solve directly
            let (l1, l2) = eig2(
                h[idx(lo, lo)],
                h[idx(lo, lo + 1)],
                h[idx(lo + 1, lo)],
                h[idx(lo + 1, lo + 1)],
            );
            h[idx(lo, lo)] = l1;
            h[idx(lo + 1, lo + 1)] = l2;
            h[idx(lo + 1, lo)] = Complex64::new(0.0, 0.0);
            hi -= 2;
            its = 0;
            continue;
        }

        // shifted explicit QR sweep on [lo, hi)
        let sigma = if its > 0 && its.is_multiple_of(12) {
            // exceptional shift to break limit cycles
            h[idx(hi - 1, hi - 1)] + Complex64::new(1.5 * h[idx(hi - 1, hi - 2)].norm(), 0.0)
        } else {
            wilkinson_shift(
                h[idx(hi - 2, hi - 2)],
                h[idx(hi - 2, hi - 1)],
                h[idx(hi - 1, hi - 2)],
                h[idx(hi - 1, hi - 1)],
            )
        };
        for i in lo..hi {
            h[idx(i, i)] -= sigma;
        }
        // QR by Givens rotations on rows (k, k+1)
        let mut rot = Vec::with_capacity(hi - lo - 1);
        for k in lo..hi - 1 {
            let (c, s) = givens(h[idx(k, k)], h[idx(k + 1, k)]);
            for j in k..hi {
                let a = h[idx(k, j)];
                let b = h[idx(k + 1, j)];
                h[idx(k, j)] = c * a + s * b;
                h[idx(k + 1, j)] = -s.conj() * a + c * b;
            }
            rot.push((c, s));
        }
        // RQ: apply conjugate rotations on columns (k, k+1)
        for (k, &(c, s)) in (lo..hi - 1).zip(rot.iter()) {
            let top = (k + 2).min(hi - 1);
            for i in lo..=top {
                let a = h[idx(i, k)];
                let b = h[idx(i, k + 1)];
                h[idx(i, k)] = c * a + s.conj() * b;
                h[idx(i, k + 1)] = -s * a + c * b;
            }
        }
        for i in lo..hi {
            h[idx(i, i)] += sigma;
        }
        its += 1;
        total += 1;
    }
    Ok(())
}

/// Complex Givens rotation with real cosine, zeroing `b` in (a, b)ᵀ.
fn givens(a: Complex64, b: Complex64) -> (Complex64, Complex64) {
    let na = a.norm();
    let nb = b.norm();
    if nb == 0.0 {
        return (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
    }
    let r = (na * na + nb * nb).sqrt();
    if na == 0.0 {
        return (Complex64::new(0.0, 0.0), b.conj() / nb);
    }
    let c = Complex64::new(na / r, 0.0);
    let s = (a / na) * b.conj() / r;
    (c, s)
}

/// Eigenvalues of a complex 2x2 matrix.
fn eig2(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> (Complex64, Complex64) {
    let tr = a + d;
    let half = tr * 0.5;
    let disc = ((a - d) * 0.5) * ((a - d) * 0.5) + b * c;
    let root = disc.sqrt();
    (half + root, half - root)
}

/// The eigenvalue of the trailing 2x2 that is closer to the corner entry.
fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let (l1, l2) = eig2(a, b, c, d);
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Unit-norm eigenvector for a known eigenvalue, by inverse iteration.
///
/// The returned vector is phase-fixed: its largest-modulus component is real
/// and positive. Fails if no iterate reaches a residual of `1e-8 * ||A||`.
pub fn eigenvector_for(a: &DenseMatrix, lambda: Complex64) -> Result<Vec<Complex64>> {
    let n = a.rows();
    if n == 0 {
        return Err(Error::InvalidInput("empty matrix".into()));
    }
    let scale = a.max_abs().max(1e-300);
    let target = 1e-10 * scale * (n as f64);
    let acceptable = 1e-8 * a.frobenius_norm().max(1e-300);

    let mut best: Option<(f64, Vec<Complex64>)> = None;
    for attempt in 0..6 {
        let bump = if attempt == 0 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(1.0, 1.0) * (1e-13 * scale * 4f64.powi(attempt))
        };
        let shift = lambda + bump;
        let mut m: Vec<Complex64> = a
            .data()
            .iter()
            .map(|&x| Complex64::new(x, 0.0))
            .collect();
        for i in 0..n {
            m[i * n + i] -= shift;
        }
        let lu = match LuFactors::new(m, n, scale) {
            Some(lu) => lu,
            None => continue,
        };
        let mut x: Vec<Complex64> = (0..n)
            .map(|i| Complex64::new(1.0 / (i as f64 + 1.0), 0.0))
            .collect();
        normalize(&mut x);
        for _ in 0..10 {
            let mut y = lu.solve(&x);
            if !y.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
                break;
            }
            normalize(&mut y);
            let res = residual(a, lambda, &y);
            if best.as_ref().is_none_or(|(b, _)| res < *b) {
                best = Some((res, y.clone()));
            }
            x = y;
            if res <= target {
                break;
            }
        }
        if let Some((res, _)) = &best {
            if *res <= target {
                break;
            }
        }
    }

    match best {
        Some((res, mut v)) if res <= acceptable => {
            canonicalize_phase(&mut v);
            Ok(v)
        }
        _ => Err(Error::Numeric(format!(
            "inverse iteration failed for eigenvalue {lambda}"
        ))),
    }
}

fn residual(a: &DenseMatrix, lambda: Complex64, x: &[Complex64]) -> f64 {
    let n = a.rows();
    let mut sum = 0.0;
    for i in 0..n {
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, &xj) in x.iter().enumerate() {
            acc += a.get(i, j) * xj;
        }
        acc -= lambda * x[i];
        sum += acc.norm_sqr();
    }
    sum.sqrt()
}

fn normalize(x: &mut [Complex64]) {
    let norm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 {
        for z in x.iter_mut() {
            *z /= norm;
        }
    }
}

/// Rotate so the largest-modulus component has zero phase.
pub(crate) fn canonicalize_phase(x: &mut [Complex64]) {
    let mut max_norm = 0.0f64;
    for z in x.iter() {
        max_norm = max_norm.max(z.norm());
    }
    if max_norm == 0.0 {
        return;
    }
    let pivot = x
        .iter()
        .find(|z| z.norm() >= max_norm * (1.0 - 1e-12))
        .copied()
        .unwrap();
    let phase = pivot / pivot.norm();
    let rot = phase.conj();
    for z in x.iter_mut() {
        *z *= rot;
    }
}

/// Complex LU with partial pivoting; near-zero pivots are nudged so inverse
/// iteration can proceed on (A − λI) with λ an exact eigenvalue.
struct LuFactors {
    n: usize,
    lu: Vec<Complex64>,
    perm: Vec<usize>,
}

impl LuFactors {
    fn new(mut m: Vec<Complex64>, n: usize, scale: f64) -> Option<LuFactors> {
        let idx = |i: usize, j: usize| i * n + j;
        let mut perm: Vec<usize> = (0..n).collect();
        let tiny = EPS * scale * (n as f64).max(1.0);
        for k in 0..n {
            let mut pivot_row = k;
            let mut pivot_norm = m[idx(k, k)].norm();
            for i in k + 1..n {
                let v = m[idx(i, k)].norm();
                if v > pivot_norm {
                    pivot_norm = v;
                    pivot_row = i;
                }
            }
            if pivot_row != k {
                for j in 0..n {
                    m.swap(idx(k, j), idx(pivot_row, j));
                }
                perm.swap(k, pivot_row);
            }
            if m[idx(k, k)].norm() < tiny {
                m[idx(k, k)] = Complex64::new(tiny, 0.0);
            }
            let piv = m[idx(k, k)];
            for i in k + 1..n {
                let f = m[idx(i, k)] / piv;
                m[idx(i, k)] = f;
                if f.norm() > 0.0 {
                    for j in k + 1..n {
                        let v = m[idx(k, j)];
                        m[idx(i, j)] -= f * v;
                    }
                }
            }
        }
        if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            Some(LuFactors { n, lu: m, perm })
        } else {
            None
        }
    }

    fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        let idx = |i: usize, j: usize| i * n + j;
        let mut y: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 1..n {
            for j in 0..i {
                let l = self.lu[idx(i, j)];
                let v = y[j];
                y[i] -= l * v;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let u = self.lu[idx(i, j)];
                let v = y[j];
                y[i] -= u * v;
            }
            y[i] /= self.lu[idx(i, i)];
        }
        y
    }
}
