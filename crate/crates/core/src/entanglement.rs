//! Two-site reduced states and their entanglement.

use std::fmt;
use std::str::FromStr;

use nalgebra::{Matrix2, Matrix4, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::correlators::{CorrelationData, CorrelatorSet};
use crate::error::{Error, Result};
use crate::model::ModelParams;

/// Tolerated negative eigenvalue before a reconstructed state is rejected.
pub const POSITIVITY_LIMIT: f64 = 1e-6;
/// Entanglement values below this count as zero.
pub const ZERO_ENTANGLEMENT: f64 = 1e-8;

/// `sigma^y (x) sigma^y` in the computational basis `|00>, |01>, |10>, |11>`
/// (`0` = spin up). It is real.
fn yy() -> Matrix4<f64> {
    Matrix4::new(
        0.0, 0.0, 0.0, -1.0, //
        0.0, 0.0, 1.0, 0.0, //
        0.0, 1.0, 0.0, 0.0, //
        -1.0, 0.0, 0.0, 0.0,
    )
}

/// Real two-qubit density matrix for sites `i < j`. The first tensor factor
/// is site `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoSiteState {
    pub rho: Matrix4<f64>,
    pub i: usize,
    pub j: usize,
}

impl TwoSiteState {
    /// `rho = 1/4 [I + m_i Z(x)I + m_j I(x)Z + sum_a C^aa sigma^a(x)sigma^a]`.
    pub fn from_correlators(c: &CorrelatorSet) -> Result<Self> {
        let q = 0.25;
        let (mi, mj) = (c.mz_i, c.mz_j);
        let rho = Matrix4::new(
            q * (1.0 + mi + mj + c.czz),
            0.0,
            0.0,
            q * (c.cxx - c.cyy),
            0.0,
            q * (1.0 + mi - mj - c.czz),
            q * (c.cxx + c.cyy),
            0.0,
            0.0,
            q * (c.cxx + c.cyy),
            q * (1.0 - mi + mj - c.czz),
            0.0,
            q * (c.cxx - c.cyy),
            0.0,
            0.0,
            q * (1.0 - mi - mj + c.czz),
        );
        let state = TwoSiteState { rho, i: c.i, j: c.j };
        let min = state.min_eigenvalue();
        if min < -POSITIVITY_LIMIT {
            return Err(Error::Positivity { i: c.i, j: c.j, min_eigenvalue: min });
        }
        Ok(state)
    }

    /// Wrap an explicit density matrix (symmetrized).
    pub fn from_matrix(rho: Matrix4<f64>, i: usize, j: usize) -> Self {
        TwoSiteState { rho: 0.5 * (rho + rho.transpose()), i, j }
    }

    pub fn eigenvalues(&self) -> [f64; 4] {
        let mut ev: [f64; 4] = SymmetricEigen::new(self.rho).eigenvalues.into();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    pub fn trace(&self) -> f64 {
        self.rho.trace()
    }

    /// Transpose on the first qubit: `<a b|rho^TA|a' b'> = <a' b|rho|a b'>`.
    pub fn partial_transpose(&self) -> Matrix4<f64> {
        Matrix4::from_fn(|r, c| {
            let (a, b) = (r / 2, r % 2);
            let (ap, bp) = (c / 2, c % 2);
            self.rho[(2 * ap + b, 2 * a + bp)]
        })
    }

    pub fn partial_transpose_spectrum(&self) -> [f64; 4] {
        let mut ev: [f64; 4] = SymmetricEigen::new(self.partial_transpose()).eigenvalues.into();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Reduced state of the first qubit.
    pub fn first_marginal(&self) -> Matrix2<f64> {
        Matrix2::from_fn(|a, ap| (0..2).map(|b| self.rho[(2 * a + b, 2 * ap + b)]).sum())
    }
}

/// `log2 || rho^TA ||_1`, which equals `log2(2 N + 1)` with the negativity `N`.
pub fn log_negativity(state: &TwoSiteState) -> f64 {
    let norm: f64 = state.partial_transpose_spectrum().iter().map(|x| x.abs()).sum();
    norm.max(1.0).log2()
}

/// Wootters concurrence from the square roots of the eigenvalues of
/// `rho rho~`, `rho~ = (Y (x) Y) rho* (Y (x) Y)`.
pub fn concurrence(state: &TwoSiteState) -> f64 {
    let y = yy();
    let tilde = y * state.rho * y;
    let product = state.rho * tilde;
    let mut lambdas: Vec<f64> = product.complex_eigenvalues().iter().map(|z| z.re.max(0.0).sqrt()).collect();
    lambdas.sort_by(|a, b| b.total_cmp(a));
    (lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Measure {
    #[default]
    #[serde(alias = "logneg")]
    LogNegativity,
    Concurrence,
}

impl Measure {
    pub fn evaluate(self, state: &TwoSiteState) -> f64 {
        match self {
            Measure::LogNegativity => log_negativity(state),
            Measure::Concurrence => concurrence(state),
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Measure::LogNegativity => "logneg",
            Measure::Concurrence => "concurrence",
        })
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "logneg" | "log-negativity" => Ok(Measure::LogNegativity),
            "concurrence" => Ok(Measure::Concurrence),
            other => Err(Error::InvalidParams(format!("unknown measure '{other}'"))),
        }
    }
}

pub fn two_site_state(data: &CorrelationData, i: usize, j: usize) -> Result<TwoSiteState> {
    TwoSiteState::from_correlators(&data.correlators(i, j))
}

pub fn pair_measure(data: &CorrelationData, i: usize, j: usize, measure: Measure) -> Result<f64> {
    Ok(measure.evaluate(&two_site_state(data, i, j)?))
}

/// `E_r` between an anchor site and the site `r` further along the chain.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntanglementProfile {
    pub params: ModelParams,
    pub anchor: usize,
    pub measure: Measure,
    /// `(r, E_r)` for `r = 1..=N - anchor`.
    pub entries: Vec<(usize, f64)>,
}

impl EntanglementProfile {
    pub fn values(&self) -> Vec<f64> {
        self.entries.iter().map(|&(_, e)| e).collect()
    }

    pub fn get(&self, r: usize) -> Option<f64> {
        self.entries.get(r.checked_sub(1)?).map(|&(_, e)| e)
    }

    /// Largest `|E_r - E'_r|` over the common range.
    pub fn max_abs_diff(&self, other: &EntanglementProfile) -> f64 {
        self.entries.iter().zip(&other.entries).map(|(a, b)| (a.1 - b.1).abs()).fold(0.0, f64::max)
    }
}

pub fn profile_from_data(
    data: &CorrelationData,
    params: &ModelParams,
    measure: Measure,
    anchor: usize,
) -> Result<EntanglementProfile> {
    let n = data.size();
    if anchor < 1 || anchor >= n {
        return Err(Error::InvalidParams(format!("anchor {anchor} must lie in 1..{n}")));
    }
    let entries = (1..=n - anchor)
        .into_par_iter()
        .map(|r| {
            pair_measure(data, anchor, anchor + r, measure)
                .map(|e| (r, e))
                .map_err(|e| e.context(format!("r = {r}, params = {params:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EntanglementProfile { params: *params, anchor, measure, entries })
}

pub fn entanglement_profile(params: &ModelParams, measure: Measure, anchor: usize) -> Result<EntanglementProfile> {
    let data = CorrelationData::from_params(params)?;
    profile_from_data(&data, params, measure, anchor)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonogamyResult {
    pub one_tangle: f64,
    pub pairwise_sum: f64,
    pub delta: f64,
}

impl MonogamyResult {
    pub fn new(one_tangle: f64, pairwise_sum: f64) -> Self {
        MonogamyResult { one_tangle, pairwise_sum, delta: one_tangle - pairwise_sum }
    }
}

/// Monogamy score with site 1 as the node. The global ground state is pure,
/// so the node's tangle with the rest is `4 det rho_1 = 1 - (m_z^1)^2`.
pub fn monogamy_from_data(data: &CorrelationData) -> Result<MonogamyResult> {
    let n = data.size();
    let m1 = data.magnetization_z(1);
    let one_tangle = (1.0 - m1 * m1).max(0.0);
    let squares = (2..=n)
        .into_par_iter()
        .map(|j| pair_measure(data, 1, j, Measure::Concurrence).map(|c| c * c))
        .collect::<Result<Vec<_>>>()?;
    Ok(MonogamyResult::new(one_tangle, squares.iter().sum()))
}

pub fn monogamy_score(params: &ModelParams) -> Result<MonogamyResult> {
    if params.n < 3 {
        return Err(Error::InvalidParams("monogamy score needs N >= 3".into()));
    }
    let data = CorrelationData::from_params(params)?;
    monogamy_from_data(&data).map_err(|e| e.context(format!("params = {params:?}")))
}
