//! One-sided Jacobi SVD.
//!
//! Column pairs of a working copy are rotated until mutually orthogonal;
//! the column norms are then the singular values and the accumulated
//! rotations the right singular vectors. Small singular values come out
//! with high relative accuracy.

use nalgebra::{DMatrix, DVector};

const MAX_SWEEPS: usize = 80;

/// `m = u * diag(s) * v^T`, columns of `u` and `v` orthonormal. Singular
/// values are returned in the column order produced by the sweeps.
pub struct Svd {
    pub u: DMatrix<f64>,
    pub s: DVector<f64>,
    pub v: DMatrix<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn rotate(data: &mut [f64], rows: usize, p: usize, q: usize, c: f64, s: f64) {
    let (lo, hi) = data.split_at_mut(q * rows);
    let cp = &mut lo[p * rows..(p + 1) * rows];
    let cq = &mut hi[..rows];
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let (a, b) = (*x, *y);
        *x = c * a - s * b;
        *y = s * a + c * b;
    }
}

pub fn jacobi_svd(m: &DMatrix<f64>) -> Option<Svd> {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "square input expected");
    let mut w = m.clone();
    let mut v = DMatrix::<f64>::identity(n, n);
    let tol = (n as f64).sqrt() * f64::EPSILON;

    let mut converged = n < 2;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (alpha, beta, gamma) = {
                    let ws = w.as_slice();
                    let cp = &ws[p * n..(p + 1) * n];
                    let cq = &ws[q * n..(q + 1) * n];
                    (dot(cp, cp), dot(cq, cq), dot(cp, cq))
                };
                if gamma == 0.0 || gamma.abs() <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(w.as_mut_slice(), n, p, q, c, s);
                rotate(v.as_mut_slice(), n, p, q, c, s);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return None;
    }

    let s = DVector::from_iterator(n, (0..n).map(|k| w.column(k).norm()));
    let smax = s.max();
    let mut u = DMatrix::<f64>::zeros(n, n);
    let mut pending = Vec::new();
    for k in 0..n {
        if s[k] > 1e-10 * smax.max(f64::MIN_POSITIVE) {
            u.set_column(k, &(w.column(k) / s[k]));
        } else {
            pending.push(k);
        }
    }
    // left vectors of tiny columns: orthonormal completion, sign overlapping the column
    for &k in &pending {
        let mut best: Option<DVector<f64>> = None;
        let mut candidates: Vec<DVector<f64>> = Vec::with_capacity(n + 1);
        if s[k] > 0.0 {
            candidates.push(w.column(k) / s[k]);
        }
        candidates.extend((0..n).map(|e| {
            let mut x = DVector::<f64>::zeros(n);
            x[e] = 1.0;
            x
        }));
        for mut cand in candidates {
            for _ in 0..2 {
                for j in 0..n {
                    if j == k || (pending.contains(&j) && u.column(j).norm() == 0.0) {
                        continue;
                    }
                    let proj = u.column(j).dot(&cand);
                    cand -= proj * u.column(j);
                }
            }
            let norm = cand.norm();
            if norm > 0.5 {
                best = Some(cand / norm);
                break;
            }
        }
        let mut col = best?;
        if col.dot(&w.column(k)) < 0.0 {
            col = -col;
        }
        u.set_column(k, &col);
    }
    Some(Svd { u, s, v })
}
