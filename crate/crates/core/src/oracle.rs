//! Exact diagonalization reference for small chains.
//!
//! The spin Hamiltonian
//! `H = sum_n (h/2) Z_n + sum_n sum_r J_r X_n Z_{n+1} ... Z_{n+r-1} X_{n+r}`
//! is built literally in the computational basis (bit `n-1` of the basis
//! index is site `n`, bit value 0 is spin up) and diagonalized densely in
//! each parity sector. Observables are read directly off the ground vector.

use nalgebra::{DMatrix, DVector, Matrix2, Matrix4, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::correlators::{CorrelationData, CorrelatorSet};
use crate::entanglement::{concurrence, log_negativity, two_site_state, MonogamyResult, TwoSiteState};
use crate::error::{Error, Result};
use crate::model::ModelParams;

pub const MAX_SITES: usize = 12;
/// Comparisons against the fermionic path require at least this many-body gap.
pub const MIN_GAP: f64 = 1e-6;

/// Dense parity-blocked spin Hamiltonian with its ground state.
#[derive(Debug, Clone)]
pub struct DenseSpinSystem {
    pub params: ModelParams,
    pub dim: usize,
    /// Sector Hamiltonians (even, odd popcount) and their basis indices.
    sectors: [(Vec<usize>, DMatrix<f64>); 2],
    pub ground_energy: f64,
    pub gap: f64,
    ground: SpinState,
}

/// A real state vector of an `n`-site chain.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinState {
    pub n: usize,
    pub amplitudes: DVector<f64>,
}

fn z_sign(state: usize, site0: usize) -> f64 {
    if state >> site0 & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Apply `H` to a single basis state, reporting `(target, amplitude)` pairs.
fn hamiltonian_row(params: &ModelParams, couplings: &[f64], s: usize, mut emit: impl FnMut(usize, f64)) {
    let n = params.n;
    let diag: f64 = (0..n).map(|k| 0.5 * params.h * z_sign(s, k)).sum();
    emit(s, diag);
    for (idx, &j) in couplings.iter().enumerate() {
        let r = idx + 1;
        for a in 0..n.saturating_sub(r) {
            let string: f64 = (a + 1..a + r).map(|k| z_sign(s, k)).product();
            emit(s ^ (1 << a) ^ (1 << (a + r)), j * string);
        }
    }
}

pub fn build_spin_hamiltonian(params: &ModelParams) -> Result<DenseSpinSystem> {
    if params.n > MAX_SITES {
        return Err(Error::Size { n: params.n, max: MAX_SITES });
    }
    let n = params.n;
    let dim = 1usize << n;
    let couplings = params.couplings();
    let mut position = vec![0usize; dim];
    let mut bases: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
    for s in 0..dim {
        let p = (s.count_ones() % 2) as usize;
        position[s] = bases[p].len();
        bases[p].push(s);
    }

    let mut sectors = Vec::with_capacity(2);
    let mut spectra = Vec::new();
    let mut best: Option<(f64, usize, DVector<f64>)> = None;
    for (p, basis) in bases.into_iter().enumerate() {
        let d = basis.len();
        let mut h = DMatrix::<f64>::zeros(d, d);
        for (col, &s) in basis.iter().enumerate() {
            hamiltonian_row(params, couplings.values(), s, |t, amp| h[(position[t], col)] += amp);
        }
        let eig = SymmetricEigen::new(h.clone());
        let (k0, e0) =
            eig.eigenvalues.iter().enumerate().fold((0, f64::INFINITY), |b, (k, &e)| if e < b.1 { (k, e) } else { b });
        spectra.extend(eig.eigenvalues.iter().copied());
        if best.as_ref().map_or(true, |b| e0 < b.0) {
            best = Some((e0, p, eig.eigenvectors.column(k0).into_owned()));
        }
        sectors.push((basis, h));
    }
    spectra.sort_by(f64::total_cmp);
    let (ground_energy, parity, vector) = best.expect("two sectors");

    let mut amplitudes = DVector::<f64>::zeros(dim);
    for (k, &s) in sectors[parity].0.iter().enumerate() {
        amplitudes[s] = vector[k];
    }
    let sectors: [(Vec<usize>, DMatrix<f64>); 2] = sectors.try_into().expect("two sectors");
    Ok(DenseSpinSystem {
        params: *params,
        dim,
        sectors,
        ground_energy,
        gap: spectra[1] - spectra[0],
        ground: SpinState { n, amplitudes: amplitudes.normalize() },
    })
}

impl DenseSpinSystem {
    /// Full `2^N x 2^N` Hamiltonian assembled from the parity sectors.
    pub fn hamiltonian(&self) -> DMatrix<f64> {
        let mut h = DMatrix::<f64>::zeros(self.dim, self.dim);
        for (basis, block) in &self.sectors {
            for (a, &sa) in basis.iter().enumerate() {
                for (b, &sb) in basis.iter().enumerate() {
                    h[(sa, sb)] = block[(a, b)];
                }
            }
        }
        h
    }

    /// Ground state, refused when the gap is too small for it to be unique.
    pub fn ground_state(&self) -> Result<&SpinState> {
        if self.gap < MIN_GAP {
            return Err(Error::Degeneracy { gap: self.gap });
        }
        Ok(&self.ground)
    }

    /// Ground state regardless of the gap.
    pub fn ground_state_unchecked(&self) -> &SpinState {
        &self.ground
    }

    pub fn observables(&self, i: usize, j: usize) -> Result<CorrelatorSet> {
        Ok(self.ground_state()?.correlators(i, j))
    }

    pub fn two_site_and_measures(&self, i: usize, j: usize) -> Result<(TwoSiteState, f64, f64)> {
        let rho = self.ground_state()?.two_site_state(i, j);
        let (ln, c) = (log_negativity(&rho), concurrence(&rho));
        Ok((rho, ln, c))
    }
}

impl SpinState {
    pub fn new(n: usize, amplitudes: Vec<f64>) -> Self {
        assert_eq!(amplitudes.len(), 1 << n);
        SpinState { n, amplitudes: DVector::from_vec(amplitudes).normalize() }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    fn bit(i: usize) -> usize {
        1 << (i - 1)
    }

    pub fn magnetization_z(&self, i: usize) -> f64 {
        (0..self.dim()).map(|s| self.amplitudes[s].powi(2) * z_sign(s, i - 1)).sum()
    }

    /// `<X_i X_j>`.
    pub fn xx(&self, i: usize, j: usize) -> f64 {
        let mask = Self::bit(i) | Self::bit(j);
        (0..self.dim()).map(|s| self.amplitudes[s] * self.amplitudes[s ^ mask]).sum()
    }

    /// `<Y_i Y_j>`; `Y|0> = i|1>`, `Y|1> = -i|0>`.
    pub fn yy(&self, i: usize, j: usize) -> f64 {
        let mask = Self::bit(i) | Self::bit(j);
        (0..self.dim())
            .map(|s| -z_sign(s, i - 1) * z_sign(s, j - 1) * self.amplitudes[s] * self.amplitudes[s ^ mask])
            .sum()
    }

    pub fn zz(&self, i: usize, j: usize) -> f64 {
        (0..self.dim()).map(|s| self.amplitudes[s].powi(2) * z_sign(s, i - 1) * z_sign(s, j - 1)).sum()
    }

    /// `<X_i Z_{i+1} ... Z_{j-1} X_j>`.
    pub fn string_xx(&self, i: usize, j: usize) -> f64 {
        let mask = Self::bit(i) | Self::bit(j);
        (0..self.dim())
            .map(|s| {
                let string: f64 = (i..j - 1).map(|k| z_sign(s, k)).product();
                string * self.amplitudes[s] * self.amplitudes[s ^ mask]
            })
            .sum()
    }

    /// `<Y_i Z_{i+1} ... Z_{j-1} Y_j>`.
    pub fn string_yy(&self, i: usize, j: usize) -> f64 {
        let mask = Self::bit(i) | Self::bit(j);
        (0..self.dim())
            .map(|s| {
                let string: f64 = (i..j - 1).map(|k| z_sign(s, k)).product();
                -string * z_sign(s, i - 1) * z_sign(s, j - 1) * self.amplitudes[s] * self.amplitudes[s ^ mask]
            })
            .sum()
    }

    pub fn correlators(&self, i: usize, j: usize) -> CorrelatorSet {
        CorrelatorSet {
            i,
            j,
            mz_i: self.magnetization_z(i),
            mz_j: self.magnetization_z(j),
            cxx: self.xx(i, j),
            cyy: self.yy(i, j),
            czz: self.zz(i, j),
        }
    }

    /// Reduced state of sites `i < j` by partial trace; basis `|a_i b_j>`.
    pub fn two_site_state(&self, i: usize, j: usize) -> TwoSiteState {
        let (bi, bj) = (Self::bit(i), Self::bit(j));
        let mut rho = Matrix4::<f64>::zeros();
        for s in 0..self.dim() {
            let a = usize::from(s & bi != 0);
            let b = usize::from(s & bj != 0);
            let rest = s & !(bi | bj);
            for ap in 0..2 {
                for bp in 0..2 {
                    let t = rest | if ap == 1 { bi } else { 0 } | if bp == 1 { bj } else { 0 };
                    rho[(2 * a + b, 2 * ap + bp)] += self.amplitudes[s] * self.amplitudes[t];
                }
            }
        }
        TwoSiteState::from_matrix(rho, i, j)
    }

    pub fn one_site_state(&self, i: usize) -> Matrix2<f64> {
        let bi = Self::bit(i);
        let mut rho = Matrix2::<f64>::zeros();
        for s in 0..self.dim() {
            let a = usize::from(s & bi != 0);
            rho[(a, a)] += self.amplitudes[s].powi(2);
            let t = s ^ bi;
            rho[(a, 1 - a)] += self.amplitudes[s] * self.amplitudes[t];
        }
        rho
    }

    /// Monogamy score with site 1 as the node: tangle `4 det rho_1` minus
    /// the squared concurrences with every other site.
    pub fn monogamy(&self) -> MonogamyResult {
        let one_tangle = (4.0 * self.one_site_state(1).determinant()).max(0.0);
        let pairwise = (2..=self.n).map(|j| concurrence(&self.two_site_state(1, j)).powi(2)).sum();
        MonogamyResult::new(one_tangle, pairwise)
    }
}

/// Maximum absolute deviations between the free-fermion path and exact
/// diagonalization.
#[derive(Debug, Clone, Default, Serialize, PartialEq)]
pub struct Deviations {
    pub ground_energy: f64,
    pub magnetization: f64,
    pub cxx: f64,
    pub cyy: f64,
    pub czz: f64,
    pub string_xx: f64,
    pub string_yy: f64,
    pub rho: f64,
    pub log_negativity: f64,
    pub concurrence: f64,
    pub monogamy: f64,
}

impl Deviations {
    /// Every deviation with its name, in a fixed order.
    pub fn named(&self) -> [(&'static str, f64); 11] {
        [
            ("ground_energy", self.ground_energy),
            ("magnetization", self.magnetization),
            ("cxx", self.cxx),
            ("cyy", self.cyy),
            ("czz", self.czz),
            ("string_xx", self.string_xx),
            ("string_yy", self.string_yy),
            ("rho", self.rho),
            ("log_negativity", self.log_negativity),
            ("concurrence", self.concurrence),
            ("monogamy", self.monogamy),
        ]
    }

    pub fn max(&self) -> f64 {
        self.named().iter().map(|&(_, v)| v).fold(0.0, f64::max)
    }

    fn merge(&mut self, o: &Deviations) {
        self.ground_energy = self.ground_energy.max(o.ground_energy);
        self.magnetization = self.magnetization.max(o.magnetization);
        self.cxx = self.cxx.max(o.cxx);
        self.cyy = self.cyy.max(o.cyy);
        self.czz = self.czz.max(o.czz);
        self.string_xx = self.string_xx.max(o.string_xx);
        self.string_yy = self.string_yy.max(o.string_yy);
        self.rho = self.rho.max(o.rho);
        self.log_negativity = self.log_negativity.max(o.log_negativity);
        self.concurrence = self.concurrence.max(o.concurrence);
        self.monogamy = self.monogamy.max(o.monogamy);
    }
}

/// Compare every exposed quantity at one parameter point.
pub fn compare_point(params: &ModelParams) -> Result<Deviations> {
    let sys = build_spin_hamiltonian(params)?;
    let exact = sys.ground_state()?;
    let data = CorrelationData::from_params(params)?;
    let qf = crate::quadratic::QuadraticForm::from_params(params);
    let sol = crate::bogoliubov::diagonalize(&qf)?;

    let mut d = Deviations { ground_energy: (sol.ground_energy() - sys.ground_energy).abs(), ..Default::default() };
    let n = params.n;
    for i in 1..=n {
        d.magnetization = d.magnetization.max((data.magnetization_z(i) - exact.magnetization_z(i)).abs());
    }
    for i in 1..n {
        for j in i + 1..=n {
            let ff = data.correlators(i, j);
            let ex = exact.correlators(i, j);
            d.cxx = d.cxx.max((ff.cxx - ex.cxx).abs());
            d.cyy = d.cyy.max((ff.cyy - ex.cyy).abs());
            d.czz = d.czz.max((ff.czz - ex.czz).abs());
            d.string_xx = d.string_xx.max((data.string_correlator_xx(i, j) - exact.string_xx(i, j)).abs());
            d.string_yy = d.string_yy.max((data.string_correlator_yy(i, j) - exact.string_yy(i, j)).abs());
            let rho_ff = two_site_state(&data, i, j)?;
            let rho_ex = exact.two_site_state(i, j);
            d.rho = d.rho.max((rho_ff.rho - rho_ex.rho).amax());
            d.log_negativity = d.log_negativity.max((log_negativity(&rho_ff) - log_negativity(&rho_ex)).abs());
            d.concurrence = d.concurrence.max((concurrence(&rho_ff) - concurrence(&rho_ex)).abs());
        }
    }
    if n >= 3 {
        let ff = crate::entanglement::monogamy_from_data(&data)?;
        d.monogamy = (ff.delta - exact.monogamy().delta).abs();
    }
    Ok(d)
}

#[derive(Debug, Clone, Serialize)]
pub struct PointReport {
    pub params: ModelParams,
    pub gap: f64,
    pub deviations: Deviations,
}

#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceReport {
    pub seed: u64,
    pub points: Vec<PointReport>,
    pub max: Deviations,
}

/// Draw a gapped random parameter point: `N in {4, 6, 8, 10}`,
/// `Z in 1..N`, `alpha in [0, 3]`, `h in [1.2, 4.0]` away from `h = 2`.
pub fn sample_point(rng: &mut impl Rng) -> Result<(ModelParams, f64)> {
    loop {
        let n = [4usize, 6, 8, 10][rng.gen_range(0..4)];
        let z = rng.gen_range(1..n);
        let alpha = rng.gen_range(0.0..=3.0);
        let h: f64 = rng.gen_range(1.2..=4.0);
        if (h - 2.0).abs() < 0.05 {
            continue;
        }
        let params = ModelParams::new(n, z, alpha, h)?;
        let gap = build_spin_hamiltonian(&params)?.gap;
        if gap > MIN_GAP {
            return Ok((params, gap));
        }
    }
}

/// Randomized equivalence suite between the free-fermion path and exact
/// diagonalization.
pub fn equivalence_suite(seed: u64, points: usize) -> Result<EquivalenceReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draws = Vec::with_capacity(points);
    for _ in 0..points {
        draws.push(sample_point(&mut rng)?);
    }
    use rayon::prelude::*;
    let reports = draws
        .into_par_iter()
        .map(|(params, gap)| {
            compare_point(&params)
                .map(|deviations| PointReport { params, gap, deviations })
                .map_err(|e| e.context(format!("params = {params:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut max = Deviations::default();
    for r in &reports {
        max.merge(&r.deviations);
    }
    Ok(EquivalenceReport { seed, points: reports, max })
}
