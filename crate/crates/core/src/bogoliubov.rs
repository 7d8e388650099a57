//! Bogoliubov diagonalization of the quadratic form.
//!
//! Quasiparticle modes satisfy `(A + B) phi_k^T = xi_k psi_k^T` and
//! `(A - B) psi_k^T = xi_k phi_k^T`. Because `A - B = (A + B)^T`, these are
//! exactly the singular triplets of `A + B`: `phi_k` is the right singular
//! vector, `psi_k` the left one and `xi_k` the singular value. The ground
//! state is the quasiparticle vacuum with energy `-1/2 sum_k xi_k`.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::linalg::jacobi_svd;
use crate::quadratic::QuadraticForm;

/// Singular values below this are reported as exact zero modes.
pub const ZERO_MODE_CLAMP: f64 = 1e-12;
/// Modes below this get the deterministic zero-mode sign convention.
pub const ZERO_MODE_TOL: f64 = 1e-10;
const RESIDUAL_LIMIT: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct BogoliubovSolution {
    /// Quasiparticle energies, ascending.
    pub xi: Vec<f64>,
    /// Row `k` is `phi_k`.
    pub phi: DMatrix<f64>,
    /// Row `k` is `psi_k`.
    pub psi: DMatrix<f64>,
}

impl BogoliubovSolution {
    pub fn size(&self) -> usize {
        self.xi.len()
    }

    pub fn ground_energy(&self) -> f64 {
        -0.5 * self.xi.iter().sum::<f64>()
    }

    pub fn zero_modes(&self) -> Vec<usize> {
        (0..self.size()).filter(|&k| self.xi[k] < ZERO_MODE_TOL).collect()
    }

    /// Flip the sign of `phi_k` alone. Only meaningful for zero modes, whose
    /// relative sign the coupled equations leave free.
    pub fn flip_relative_sign(&mut self, k: usize) {
        let mut row = self.phi.row_mut(k);
        row.neg_mut();
    }

    /// Largest entrywise residual of the two coupled mode equations.
    pub fn residual(&self, qf: &QuadraticForm) -> f64 {
        let apb = qf.a_plus_b();
        let amb = qf.a_minus_b();
        let xi = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&self.xi));
        // columns are modes
        let r1 = &apb * self.phi.transpose() - self.psi.transpose() * &xi;
        let r2 = &amb * self.psi.transpose() - self.phi.transpose() * &xi;
        r1.amax().max(r2.amax())
    }
}

fn first_significant(v: impl Iterator<Item = f64> + Clone) -> f64 {
    let scale = v.clone().fold(0.0f64, |m, x| m.max(x.abs()));
    v.into_iter().find(|x| x.abs() > 1e-8 * scale).unwrap_or(0.0)
}

fn canonicalize(xi: &[f64], phi: &mut DMatrix<f64>, psi: &mut DMatrix<f64>) {
    for k in 0..xi.len() {
        let lead = first_significant(phi.row(k).iter().copied());
        if lead < 0.0 {
            phi.row_mut(k).neg_mut();
            if xi[k] >= ZERO_MODE_TOL {
                psi.row_mut(k).neg_mut();
            }
        }
    }
}

fn sorted_modes(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]).then(i.cmp(&j)));
    order
}

/// Singular-value route.
pub fn diagonalize(qf: &QuadraticForm) -> Result<BogoliubovSolution> {
    let n = qf.size();
    let svd = jacobi_svd(&qf.a_plus_b()).ok_or_else(|| Error::Numerical("SVD of A + B did not converge".into()))?;
    let order = sorted_modes(svd.s.as_slice());

    let mut xi = Vec::with_capacity(n);
    let mut phi = DMatrix::<f64>::zeros(n, n);
    let mut psi = DMatrix::<f64>::zeros(n, n);
    for (k, &src) in order.iter().enumerate() {
        let s = svd.s[src];
        xi.push(if s < ZERO_MODE_CLAMP { 0.0 } else { s });
        phi.row_mut(k).copy_from(&svd.v.column(src).transpose());
        psi.row_mut(k).copy_from(&svd.u.column(src).transpose());
    }
    canonicalize(&xi, &mut phi, &mut psi);

    let sol = BogoliubovSolution { xi, phi, psi };
    let res = sol.residual(qf);
    if !(res <= RESIDUAL_LIMIT) {
        return Err(Error::Numerical(format!("mode equations violated: residual {res:e}")));
    }
    Ok(sol)
}

/// Squared-equation route: eigenvectors of `(A - B)(A + B)` give `phi_k` and
/// `xi_k^2`; `psi_k` follows from `(A + B) phi_k^T / xi_k`, or for zero
/// modes from the null space of `(A + B)(A - B)`. Loses accuracy on
/// near-zero modes and serves as a cross-check of [`diagonalize`].
pub fn diagonalize_squared(qf: &QuadraticForm) -> Result<BogoliubovSolution> {
    let n = qf.size();
    let apb = qf.a_plus_b();
    let amb = qf.a_minus_b();
    let left = SymmetricEigen::new(&amb * &apb);
    let order = sorted_modes(left.eigenvalues.as_slice());
    let scale = left.eigenvalues.amax().max(1.0);

    let mut xi = Vec::with_capacity(n);
    let mut phi = DMatrix::<f64>::zeros(n, n);
    let mut psi = DMatrix::<f64>::zeros(n, n);
    let mut zero_rows = Vec::new();
    for (k, &src) in order.iter().enumerate() {
        let lambda = left.eigenvalues[src].max(0.0);
        let e = lambda.sqrt();
        phi.row_mut(k).copy_from(&left.eigenvectors.column(src).transpose());
        if lambda > 1e-14 * scale {
            xi.push(e);
            let col = &apb * left.eigenvectors.column(src) / e;
            psi.row_mut(k).copy_from(&col.transpose());
        } else {
            xi.push(0.0);
            zero_rows.push(k);
        }
    }
    if !zero_rows.is_empty() {
        let right = SymmetricEigen::new(&apb * &amb);
        let right_order = sorted_modes(right.eigenvalues.as_slice());
        for (slot, &k) in zero_rows.iter().enumerate() {
            let src = right_order[slot];
            psi.row_mut(k).copy_from(&right.eigenvectors.column(src).transpose());
        }
    }
    canonicalize(&xi, &mut phi, &mut psi);
    Ok(BogoliubovSolution { xi, phi, psi })
}
