//! Ground-state spin correlators from the fermionic contraction matrix.
//!
//! With `A_i = c_i^+ + c_i` and `B_i = c_i^+ - c_i`, the only nonvanishing
//! contractions in the quasiparticle vacuum are `<A_i A_j> = delta_ij`,
//! `<B_i B_j> = -delta_ij` and `G_ij = <B_i A_j> = -(psi^T phi)_ij`.
//! Under `sigma^z = 1 - 2 c^+ c = A B`, every one- and two-site Pauli
//! expectation is a determinant built from `G`.

use nalgebra::DMatrix;

use crate::bogoliubov::{diagonalize, BogoliubovSolution};
use crate::error::Result;
use crate::model::ModelParams;
use crate::quadratic::QuadraticForm;

#[derive(Debug, Clone)]
pub struct CorrelationData {
    pub g: DMatrix<f64>,
    pub params: Option<ModelParams>,
}

/// Magnetizations and diagonal correlators for a site pair (1-based, `i < j`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelatorSet {
    pub i: usize,
    pub j: usize,
    pub mz_i: f64,
    pub mz_j: f64,
    pub cxx: f64,
    pub cyy: f64,
    pub czz: f64,
}

pub fn correlation_matrix(sol: &BogoliubovSolution) -> CorrelationData {
    CorrelationData { g: -(sol.psi.transpose() * &sol.phi), params: None }
}

/// Determinant as `(sign, ln|det|)` via LU with partial pivoting. A singular
/// matrix gives `(0.0, -inf)`.
pub fn sign_log_det(mut m: DMatrix<f64>) -> (f64, f64) {
    let n = m.nrows();
    debug_assert_eq!(n, m.ncols());
    let mut sign = 1.0;
    let mut log_abs = 0.0;
    for col in 0..n {
        let (pivot_row, pivot_abs) =
            (col..n)
                .map(|r| (r, m[(r, col)].abs()))
                .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pivot_abs == 0.0 {
            return (0.0, f64::NEG_INFINITY);
        }
        if pivot_row != col {
            m.swap_rows(pivot_row, col);
            sign = -sign;
        }
        let pivot = m[(col, col)];
        if pivot < 0.0 {
            sign = -sign;
        }
        log_abs += pivot.abs().ln();
        for r in col + 1..n {
            let factor = m[(r, col)] / pivot;
            if factor != 0.0 {
                for c in col + 1..n {
                    let v = m[(col, c)];
                    m[(r, c)] -= factor * v;
                }
            }
        }
    }
    (sign, log_abs)
}

fn det(m: DMatrix<f64>) -> f64 {
    let (sign, log_abs) = sign_log_det(m);
    if sign == 0.0 {
        0.0
    } else {
        sign * log_abs.exp()
    }
}

impl CorrelationData {
    /// Full pipeline from model parameters.
    pub fn from_params(params: &ModelParams) -> Result<Self> {
        let qf = QuadraticForm::from_params(params);
        let sol = diagonalize(&qf)?;
        let mut data = correlation_matrix(&sol);
        data.params = Some(*params);
        Ok(data)
    }

    pub fn size(&self) -> usize {
        self.g.nrows()
    }

    fn check_pair(&self, i: usize, j: usize) {
        assert!(i >= 1 && i < j && j <= self.size(), "invalid site pair ({i}, {j}) for N = {}", self.size());
    }

    /// `<sigma^z_i>` (1-based site) `= <A_i B_i> = -G_ii`.
    pub fn magnetization_z(&self, i: usize) -> f64 {
        assert!(i >= 1 && i <= self.size(), "invalid site {i}");
        -self.g[(i - 1, i - 1)]
    }

    /// `<sigma^x_i sigma^x_j>`: determinant of `[G_{i+a-1, i+b}]`, `a, b = 1..r`.
    pub fn correlator_xx(&self, i: usize, j: usize) -> f64 {
        self.check_pair(i, j);
        let r = j - i;
        let i0 = i - 1;
        det(DMatrix::from_fn(r, r, |a, b| self.g[(i0 + a, i0 + b + 1)]))
    }

    /// `<sigma^y_i sigma^y_j>`: determinant of `[G_{i+a, i+b-1}]`, `a, b = 1..r`.
    /// The `(-1)^(j-i)` phase of the Majorana string is already absorbed.
    pub fn correlator_yy(&self, i: usize, j: usize) -> f64 {
        self.check_pair(i, j);
        let r = j - i;
        let i0 = i - 1;
        det(DMatrix::from_fn(r, r, |a, b| self.g[(i0 + a + 1, i0 + b)]))
    }

    /// `<sigma^z_i sigma^z_j> = G_ii G_jj - G_ji G_ij`.
    pub fn correlator_zz(&self, i: usize, j: usize) -> f64 {
        self.check_pair(i, j);
        let (a, b) = (i - 1, j - 1);
        self.g[(a, a)] * self.g[(b, b)] - self.g[(b, a)] * self.g[(a, b)]
    }

    /// `<sigma^x_i sigma^z_{i+1} ... sigma^z_{j-1} sigma^x_j> = <B_i A_j> = G_ij`,
    /// the string-dressed correlator that appears in the Hamiltonian.
    pub fn string_correlator_xx(&self, i: usize, j: usize) -> f64 {
        self.check_pair(i, j);
        self.g[(i - 1, j - 1)]
    }

    /// `<sigma^y_i sigma^z_{i+1} ... sigma^z_{j-1} sigma^y_j> = -<A_i B_j> = G_ji`.
    pub fn string_correlator_yy(&self, i: usize, j: usize) -> f64 {
        self.check_pair(i, j);
        self.g[(j - 1, i - 1)]
    }

    pub fn correlators(&self, i: usize, j: usize) -> CorrelatorSet {
        CorrelatorSet {
            i,
            j,
            mz_i: self.magnetization_z(i),
            mz_j: self.magnetization_z(j),
            cxx: self.correlator_xx(i, j),
            cyy: self.correlator_yy(i, j),
            czz: self.correlator_zz(i, j),
        }
    }
}
