//! Quadratic fermion form of the open Z-neighbor chain.
//!
//! After the Jordan-Wigner map the Hamiltonian reads
//! `H = sum_ij c_i^+ A_ij c_j + 1/2 sum_ij (c_i^+ B_ij c_j^+ + h.c.) + N h / 2`
//! with `A` symmetric (field on the diagonal, hopping `J_r`) and `B`
//! antisymmetric (pairing `J_r`). No index wraps: boundaries are open.

use std::io::Write;

use nalgebra::DMatrix;

use crate::model::{CouplingTable, ModelParams};

#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticForm {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
}

pub fn build_quadratic_form(params: &ModelParams, couplings: &CouplingTable) -> QuadraticForm {
    let n = params.n;
    let mut a = DMatrix::<f64>::zeros(n, n);
    let mut b = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        a[(i, i)] = -params.h;
    }
    for (idx, &j) in couplings.values().iter().enumerate() {
        let r = idx + 1;
        for i in 0..n.saturating_sub(r) {
            a[(i, i + r)] = j;
            a[(i + r, i)] = j;
            b[(i, i + r)] = j;
            b[(i + r, i)] = -j;
        }
    }
    QuadraticForm { a, b }
}

impl QuadraticForm {
    pub fn from_params(params: &ModelParams) -> Self {
        build_quadratic_form(params, &params.couplings())
    }

    pub fn size(&self) -> usize {
        self.a.nrows()
    }

    pub fn a_plus_b(&self) -> DMatrix<f64> {
        &self.a + &self.b
    }

    pub fn a_minus_b(&self) -> DMatrix<f64> {
        &self.a - &self.b
    }

    /// The `2N x 2N` Nambu block `[[A, B], [-B, -A]]`; its spectrum is `+-xi_k`.
    pub fn nambu_block(&self) -> DMatrix<f64> {
        let n = self.size();
        let mut m = DMatrix::<f64>::zeros(2 * n, 2 * n);
        m.view_mut((0, 0), (n, n)).copy_from(&self.a);
        m.view_mut((0, n), (n, n)).copy_from(&self.b);
        m.view_mut((n, 0), (n, n)).copy_from(&(-&self.b));
        m.view_mut((n, n), (n, n)).copy_from(&(-&self.a));
        m
    }

    /// Largest `|i - j|` over nonzero entries of either matrix.
    pub fn bandwidth(&self) -> usize {
        let n = self.size();
        let mut bw = 0;
        for i in 0..n {
            for j in 0..n {
                if self.a[(i, j)] != 0.0 || self.b[(i, j)] != 0.0 {
                    bw = bw.max(i.abs_diff(j));
                }
            }
        }
        bw
    }

    /// Row-major CSV dump: the `A` block followed by the `B` block, each row
    /// prefixed with the matrix name and row index.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let n = self.size();
        write!(out, "matrix,row")?;
        for j in 0..n {
            write!(out, ",c{}", j + 1)?;
        }
        writeln!(out)?;
        for (name, m) in [("A", &self.a), ("B", &self.b)] {
            for i in 0..n {
                write!(out, "{name},{}", i + 1)?;
                for j in 0..n {
                    write!(out, ",{}", crate::format_float(m[(i, j)]))?;
                }
                writeln!(out)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::SymmetricEigen;

    fn form(n: usize, z: usize, alpha: f64, h: f64) -> QuadraticForm {
        QuadraticForm::from_params(&ModelParams::new(n, z, alpha, h).unwrap())
    }

    #[test]
    fn two_site_nearest_neighbor() {
        let q = form(2, 1, 1.0, 0.0);
        assert_eq!(q.a, DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]));
        assert_eq!(q.b, DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]));
    }

    #[test]
    fn three_site_field_on_diagonal() {
        let q = form(3, 1, 1.0, 2.0);
        for i in 0..3 {
            assert_eq!(q.a[(i, i)], -2.0);
        }
        assert_eq!(q.a[(0, 1)], 1.0);
        assert_eq!(q.a[(1, 2)], 1.0);
        assert_eq!(q.a[(0, 2)], 0.0);
    }

    #[test]
    fn uniform_couplings_fill_all_distances() {
        let q = form(4, 3, 0.0, 0.0);
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    assert!((q.a[(i, j)] - 1.0 / 3.0).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn nearest_neighbor_matches_tridiagonal_reference() {
        let h = 0.7;
        let q = form(4, 1, 2.0, h);
        let a = DMatrix::from_row_slice(
            4,
            4,
            &[-h, 1.0, 0.0, 0.0, 1.0, -h, 1.0, 0.0, 0.0, 1.0, -h, 1.0, 0.0, 0.0, 1.0, -h],
        );
        let b = DMatrix::from_row_slice(
            4,
            4,
            &[0.0, 1.0, 0.0, 0.0, -1.0, 0.0, 1.0, 0.0, 0.0, -1.0, 0.0, 1.0, 0.0, 0.0, -1.0, 0.0],
        );
        assert_eq!(q.a, a);
        assert_eq!(q.b, b);
    }

    #[test]
    fn symmetry_band_and_paired_spectrum() {
        for n in [2usize, 5, 9, 16] {
            for z in [1, (n - 1) / 2 + 1, n - 1] {
                let z = z.clamp(1, n - 1);
                let q = form(n, z, 1.3, 1.7);
                assert_eq!(q.a, q.a.transpose());
                assert_eq!(q.b, -q.b.transpose());
                assert!(q.bandwidth() <= z);

                let mut ev: Vec<f64> = SymmetricEigen::new(q.nambu_block()).eigenvalues.iter().copied().collect();
                ev.sort_by(f64::total_cmp);
                for k in 0..n {
                    assert!((ev[k] + ev[2 * n - 1 - k]).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn csv_dump_shape() {
        let q = form(3, 2, 1.0, 0.5);
        let mut buf = Vec::new();
        q.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 7);
        assert_eq!(lines[0], "matrix,row,c1,c2,c3");
        assert!(lines[4].starts_with("B,1,"));
    }
}
