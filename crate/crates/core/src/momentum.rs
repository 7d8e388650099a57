//! Momentum-space dispersion of the translation-invariant chain.
//!
//! With `J(k) = sum_r J_r e^{ikr}`, the quasiparticle energy is
//! `omega_k = 2 sqrt((h/2 - Re J(k))^2 + (Im J(k))^2)`. Couplings come either
//! from a finite range `Z` or from the infinite-range chain normalized by
//! `zeta(alpha)`, in which case `J(k) = Li_alpha(e^{ik}) / zeta(alpha)`.

use nalgebra::Complex;
use serde::Serialize;
use statrs::function::gamma::ln_gamma;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::{riemann_zeta, zeta_euler_maclaurin, CouplingTable, ModelParams};

/// `(Re J(k), Im J(k))` for a finite coupling table.
pub fn structure_factor(couplings: &CouplingTable, k: f64) -> (f64, f64) {
    couplings.values().iter().enumerate().rev().fold((0.0, 0.0), |(re, im), (idx, &j)| {
        let phase = k * (idx + 1) as f64;
        (re + j * phase.cos(), im + j * phase.sin())
    })
}

/// Riemann zeta on the whole real line except the pole at 1.
pub fn zeta_real(x: f64) -> f64 {
    if x == 1.0 {
        return f64::INFINITY;
    }
    if x >= 0.0 {
        return zeta_euler_maclaurin(x);
    }
    zeta_over_factorial(x, 0)
}

/// `zeta(x) / n!` for `x < 0` through the reflection formula, in log form so
/// large `n` neither overflows nor underflows.
fn zeta_over_factorial(x: f64, n: usize) -> f64 {
    if x.fract() == 0.0 && (x as i64) % 2 == 0 {
        return 0.0;
    }
    let sine = (0.5 * PI * x).sin();
    let log_mag = x * 2f64.ln() + (x - 1.0) * PI.ln() + ln_gamma(1.0 - x) - ln_gamma(n as f64 + 1.0);
    sine * log_mag.exp() * zeta_euler_maclaurin(1.0 - x)
}

fn zeta_coefficient(x: f64, n: usize) -> f64 {
    if x < 0.0 {
        zeta_over_factorial(x, n)
    } else {
        zeta_real(x) / (1..=n).map(|m| m as f64).product::<f64>()
    }
}

const SERIES_MAX_TERMS: usize = 400;
const NEAR_INTEGER: f64 = 2e-3;

fn imag_power(n: usize) -> Complex<f64> {
    match n % 4 {
        0 => Complex::new(1.0, 0.0),
        1 => Complex::new(0.0, 1.0),
        2 => Complex::new(-1.0, 0.0),
        _ => Complex::new(0.0, -1.0),
    }
}

/// `sum_n zeta(s - n) (ik)^n / n!`, optionally skipping one index.
fn regular_series(s: f64, k: f64, skip: Option<usize>) -> Complex<f64> {
    let mut sum = Complex::new(0.0, 0.0);
    let mut kn = 1.0;
    for n in 0..SERIES_MAX_TERMS {
        if Some(n) != skip {
            let term = zeta_coefficient(s - n as f64, n) * kn;
            sum += imag_power(n) * term;
            if n as f64 > s + 2.0 && term != 0.0 && term.abs() < 1e-18 * sum.norm().max(1e-300) {
                break;
            }
        }
        kn *= k;
    }
    sum
}

fn polylog_generic(s: f64, k: f64) -> Complex<f64> {
    // Gamma(1-s) (-ik)^(s-1); Gamma(1-s) signed via the reflection formula
    let gamma = PI / ((PI * s).sin() * ln_gamma(s).exp());
    let phase = Complex::from_polar(1.0, -0.5 * PI * (s - 1.0));
    phase * gamma * k.powf(s - 1.0) + regular_series(s, k, None)
}

fn polylog_integer(m: usize, k: f64) -> Complex<f64> {
    let harmonic: f64 = (1..m).map(|j| 1.0 / j as f64).sum();
    let fact: f64 = (1..m).map(|j| j as f64).product();
    let log = Complex::new(k.ln(), -0.5 * PI);
    let power = imag_power(m - 1) * k.powi(m as i32 - 1) / fact;
    power * (Complex::new(harmonic, 0.0) - log) + regular_series(m as f64, k, Some(m - 1))
}

/// `Li_s(e^{ik})` for `s > 1` and `|k| <= pi`.
pub fn polylog_unit_circle(s: f64, k: f64) -> Result<Complex<f64>> {
    if !(s > 1.0) || !s.is_finite() {
        return Err(Error::Domain(format!("Li_s(e^ik) on the unit circle needs s > 1, got {s}")));
    }
    if !(k.abs() <= PI) {
        return Err(Error::Domain(format!("momentum {k} outside [-pi, pi]")));
    }
    if k == 0.0 {
        return Ok(Complex::new(zeta_real(s), 0.0));
    }
    if k < 0.0 {
        return polylog_unit_circle(s, -k).map(|z| z.conj());
    }
    if k == PI {
        // alternating series: -(1 - 2^(1-s)) zeta(s)
        return Ok(Complex::new(-(1.0 - (1.0 - s).exp2()) * zeta_real(s), 0.0));
    }
    let nearest = s.round();
    let offset = s - nearest;
    if offset == 0.0 {
        return Ok(polylog_integer(nearest as usize, k));
    }
    if offset.abs() >= NEAR_INTEGER || nearest < 2.0 {
        return Ok(polylog_generic(s, k));
    }
    // quartic interpolation in s through the exact integer value and four
    // well-separated generic evaluations
    let nodes = [-2.0, -1.0, 0.0, 1.0, 2.0].map(|t: f64| nearest + t * NEAR_INTEGER);
    let values = nodes.map(|x| if x == nearest { polylog_integer(nearest as usize, k) } else { polylog_generic(x, k) });
    let mut out = Complex::new(0.0, 0.0);
    for (a, (&xa, &va)) in nodes.iter().zip(&values).enumerate() {
        let weight: f64 =
            nodes.iter().enumerate().filter(|&(b, _)| b != a).map(|(_, &xb)| (s - xb) / (xa - xb)).product();
        out += va * weight;
    }
    Ok(out)
}

/// Where the couplings `J_r` come from.
#[derive(Debug, Clone)]
pub enum CouplingSource {
    Finite(CouplingTable),
    /// `J_r = r^-alpha / zeta(alpha)` for all `r >= 1`; needs `alpha > 1`.
    Thermodynamic {
        alpha: f64,
        zeta: f64,
    },
}

impl CouplingSource {
    pub fn finite(params: &ModelParams) -> Self {
        Self::Finite(params.couplings())
    }

    pub fn thermodynamic(alpha: f64) -> Result<Self> {
        let zeta = riemann_zeta(alpha)?;
        Ok(Self::Thermodynamic { alpha, zeta })
    }

    pub fn structure_factor(&self, k: f64) -> Result<(f64, f64)> {
        match self {
            Self::Finite(c) => Ok(structure_factor(c, k)),
            Self::Thermodynamic { alpha, zeta } => {
                let li = polylog_unit_circle(*alpha, k)?;
                Ok((li.re / zeta, li.im / zeta))
            }
        }
    }

    pub fn omega(&self, h: f64, k: f64) -> Result<f64> {
        let (re, im) = self.structure_factor(k)?;
        Ok(2.0 * (0.5 * h - re).hypot(im))
    }

    /// `2 Re J(pi)`, the field at which the `k = pi` gap closes.
    pub fn critical_field_pi(&self) -> f64 {
        match self {
            Self::Finite(c) => critical_field_pi(c),
            Self::Thermodynamic { alpha, .. } => {
                thermodynamic_critical_field_pi(*alpha).expect("source built with alpha > 1")
            }
        }
    }
}

/// `2 sum_r (-1)^r J_r`.
pub fn critical_field_pi(couplings: &CouplingTable) -> f64 {
    2.0 * couplings.values().iter().enumerate().rev().map(|(idx, &j)| if idx % 2 == 0 { -j } else { j }).sum::<f64>()
}

/// Infinite-range closed form `2 (2^(1-alpha) - 1)`, defined for `alpha >= 1`.
pub fn thermodynamic_critical_field_pi(alpha: f64) -> Result<f64> {
    if !(alpha >= 1.0) {
        return Err(Error::Domain(format!("infinite-range couplings are not normalizable for alpha = {alpha} < 1")));
    }
    Ok(2.0 * ((1.0 - alpha).exp2() - 1.0))
}

/// Momentum sampling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KGrid {
    /// `k = q pi / N` for odd `q` in `(-N, N]`.
    HalfInteger {
        n: usize,
    },
    Uniform {
        lo: f64,
        hi: f64,
        points: usize,
    },
    /// Geometric spacing; `0 < lo < hi`.
    Log {
        lo: f64,
        hi: f64,
        points: usize,
    },
}

impl KGrid {
    pub fn points(&self) -> Result<Vec<f64>> {
        let check = |lo: f64, hi: f64, points: usize| {
            if points < 2 || !(lo < hi) || lo < -PI || hi > PI {
                Err(Error::InvalidParams(format!("bad k grid [{lo}, {hi}] with {points} points")))
            } else {
                Ok(())
            }
        };
        match *self {
            Self::HalfInteger { n } => {
                if n == 0 {
                    return Err(Error::InvalidParams("half-integer grid needs N >= 1".into()));
                }
                let n = n as i64;
                Ok((-n + 1..=n).filter(|q| q.rem_euclid(2) == 1).map(|q| q as f64 * PI / n as f64).collect())
            }
            Self::Uniform { lo, hi, points } => {
                check(lo, hi, points)?;
                let step = (hi - lo) / (points - 1) as f64;
                Ok((0..points).map(|i| if i + 1 == points { hi } else { lo + step * i as f64 }).collect())
            }
            Self::Log { lo, hi, points } => {
                check(lo, hi, points)?;
                if !(lo > 0.0) {
                    return Err(Error::InvalidParams(format!("log grid needs lo > 0, got {lo}")));
                }
                let ratio = (hi / lo).ln() / (points - 1) as f64;
                Ok((0..points).map(|i| if i + 1 == points { hi } else { lo * (ratio * i as f64).exp() }).collect())
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DispersionCurve {
    pub k: Vec<f64>,
    pub omega: Vec<f64>,
    pub params: ModelParams,
    pub thermodynamic: bool,
}

impl DispersionCurve {
    pub fn len(&self) -> usize {
        self.k.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k.is_empty()
    }

    /// Least-squares slope of `ln omega` against `ln k` over `[k_lo, k_hi]`.
    pub fn log_log_slope(&self, k_lo: f64, k_hi: f64) -> Result<f64> {
        let pts: Vec<(f64, f64)> = self
            .k
            .iter()
            .zip(&self.omega)
            .filter(|&(&k, &w)| k >= k_lo && k <= k_hi && k > 0.0 && w > 0.0)
            .map(|(&k, &w)| (k.ln(), w.ln()))
            .collect();
        if pts.len() < 2 {
            return Err(Error::InsufficientData(format!("{} usable points in [{k_lo}, {k_hi}]", pts.len())));
        }
        let count = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / count;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / count;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        Ok(sxy / sxx)
    }
}

/// Evaluate `omega_k` on a grid. `thermodynamic` selects the infinite-range
/// couplings (uses only `alpha` and `h` from `params`).
pub fn dispersion(params: &ModelParams, grid: &KGrid, thermodynamic: bool) -> Result<DispersionCurve> {
    let source =
        if thermodynamic { CouplingSource::thermodynamic(params.alpha)? } else { CouplingSource::finite(params) };
    let k = grid.points()?;
    let omega = k.iter().map(|&kk| source.omega(params.h, kk)).collect::<Result<Vec<_>>>()?;
    Ok(DispersionCurve { k, omega, params: *params, thermodynamic })
}

/// `d omega / dk`: centered differences inside, one-sided at the ends.
pub fn group_velocity(curve: &DispersionCurve) -> Result<Vec<f64>> {
    let (k, w) = (&curve.k, &curve.omega);
    let n = k.len();
    if n < 3 {
        return Err(Error::InsufficientData(format!("group velocity needs >= 3 points, got {n}")));
    }
    if k.windows(2).any(|p| !(p[1] > p[0])) {
        return Err(Error::InvalidParams("k grid must be strictly increasing".into()));
    }
    Ok((0..n)
        .map(|i| {
            let (a, b) = match i {
                0 => (0, 1),
                _ if i == n - 1 => (n - 2, n - 1),
                _ => (i - 1, i + 1),
            };
            (w[b] - w[a]) / (k[b] - k[a])
        })
        .collect())
}

const GOLDEN_TOL: f64 = 1e-10;
const ROOT_LIMIT: f64 = 1e-9;

/// Field `h` in `[h_lo, h_hi]` where `omega_k(h)` vanishes.
///
/// The sign of `h/2 - Re J(k)` must differ at the bracket ends. The minimum
/// of `omega_k` over the bracket is then located by golden-section search
/// and accepted as a root when it is below `1e-9`.
pub fn verify_gap_closing(source: &CouplingSource, k: f64, h_lo: f64, h_hi: f64) -> Result<f64> {
    if !(h_lo < h_hi) {
        return Err(Error::Bracket(format!("empty bracket [{h_lo}, {h_hi}]")));
    }
    let (re, _) = source.structure_factor(k)?;
    let (a, b) = (0.5 * h_lo - re, 0.5 * h_hi - re);
    if a * b > 0.0 {
        return Err(Error::Bracket(format!(
            "h/2 - Re J(k) keeps sign on [{h_lo}, {h_hi}] at k = {k} (values {a:e}, {b:e})"
        )));
    }
    let omega = |h: f64| source.omega(h, k);
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let (mut lo, mut hi) = (h_lo, h_hi);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (omega(x1)?, omega(x2)?);
    while hi - lo > GOLDEN_TOL {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = omega(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = omega(x2)?;
        }
    }
    let h = 0.5 * (lo + hi);
    let min = omega(h)?;
    if min < ROOT_LIMIT {
        Ok(h)
    } else {
        Err(Error::Bracket(format!("omega_k bottoms out at {min:e} (h = {h}); gap does not close at k = {k}")))
    }
}
