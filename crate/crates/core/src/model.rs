//! Model parameters, the power-law coupling profile and its normalization.
//!
//! The chain carries a transverse field `h` and string-dressed pair couplings
//! `J_r = r^(-alpha) / A` for `r = 1..=Z`, with `A` chosen so that the couplings
//! sum to one. The overall energy scale `J` is pinned to 1.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Even-index Bernoulli numbers `B_2, B_4, ..., B_24`.
pub(crate) const BERNOULLI_EVEN: [f64; 12] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
];

/// Parameters of one chain instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct ModelParams {
    pub n: usize,
    pub z: usize,
    pub alpha: f64,
    pub h: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    n: usize,
    z: Option<usize>,
    alpha: f64,
    h: f64,
}

impl TryFrom<RawParams> for ModelParams {
    type Error = Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        let z = raw.z.unwrap_or(raw.n.saturating_sub(1));
        ModelParams::new(raw.n, z, raw.alpha, raw.h)
    }
}

impl ModelParams {
    pub fn new(n: usize, z: usize, alpha: f64, h: f64) -> Result<Self> {
        let params = ModelParams { n, z, alpha, h };
        params.validate()?;
        Ok(params)
    }

    /// Fully connected chain, `Z = N - 1`.
    pub fn fully_connected(n: usize, alpha: f64, h: f64) -> Result<Self> {
        Self::new(n, n.saturating_sub(1), alpha, h)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidParams(format!("N = {} must be at least 2", self.n)));
        }
        if self.z < 1 || self.z > self.n - 1 {
            return Err(Error::InvalidParams(format!(
                "Z = {} must lie in 1..={} for N = {}",
                self.z,
                self.n - 1,
                self.n
            )));
        }
        if !(self.alpha >= 0.0) || !self.alpha.is_finite() {
            return Err(Error::InvalidParams(format!("alpha = {} must be finite and >= 0", self.alpha)));
        }
        if !self.h.is_finite() {
            return Err(Error::InvalidParams(format!("h = {} must be finite", self.h)));
        }
        Ok(())
    }

    pub fn with_z(&self, z: usize) -> Result<Self> {
        Self::new(self.n, z, self.alpha, self.h)
    }

    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        Self::new(self.n, self.z, alpha, self.h)
    }

    pub fn with_h(&self, h: f64) -> Result<Self> {
        Self::new(self.n, self.z, self.alpha, h)
    }

    pub fn couplings(&self) -> CouplingTable {
        build_couplings(self)
    }
}

/// Normalized couplings `J[r-1] = r^(-alpha) / A`, `r = 1..=Z`.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingTable {
    j: Vec<f64>,
    norm: f64,
}

impl CouplingTable {
    /// Coupling at distance `r` (1-based); zero beyond the range.
    pub fn at(&self, r: usize) -> f64 {
        if r == 0 {
            return 0.0;
        }
        self.j.get(r - 1).copied().unwrap_or(0.0)
    }

    pub fn values(&self) -> &[f64] {
        &self.j
    }

    pub fn normalization(&self) -> f64 {
        self.norm
    }

    pub fn range(&self) -> usize {
        self.j.len()
    }
}

/// Generalized harmonic number `H_Z^(alpha) = sum_{r=1}^{Z} r^(-alpha)`.
pub fn harmonic_number(z: usize, alpha: f64) -> f64 {
    // smallest terms first
    (1..=z).rev().map(|r| (r as f64).powf(-alpha)).sum()
}

/// Riemann zeta for real `alpha > 1`.
///
/// Direct sum up to `M - 1` followed by the Euler-Maclaurin tail
/// `M^(1-a)/(a-1) + M^(-a)/2 + sum_j B_2j/(2j)! (a)_(2j-1) M^(1-a-2j)`.
/// With `M = 32` and twelve correction terms the truncation error is far
/// below double precision for every `alpha > 1`.
pub fn riemann_zeta(alpha: f64) -> Result<f64> {
    if !(alpha > 1.0 + 1e-9) || !alpha.is_finite() {
        return Err(Error::Domain(format!(
            "zeta(alpha) diverges for alpha = {alpha} <= 1; the thermodynamic-limit normalization does not exist"
        )));
    }
    Ok(zeta_euler_maclaurin(alpha))
}

/// The Euler-Maclaurin sum without the domain check; it continues
/// analytically below `alpha = 1` and stays accurate for `alpha >= 0`.
pub(crate) fn zeta_euler_maclaurin(alpha: f64) -> f64 {
    const M: usize = 32;
    let m = M as f64;
    let head: f64 = (1..M).rev().map(|r| (r as f64).powf(-alpha)).sum();

    let mut tail = m.powf(1.0 - alpha) / (alpha - 1.0) + 0.5 * m.powf(-alpha);
    // rising factorial (alpha)_(2j-1) and (2j)! built incrementally
    let mut rising = alpha;
    let mut fact = 2.0;
    let mut power = m.powf(-alpha - 1.0);
    for (idx, b) in BERNOULLI_EVEN.iter().enumerate() {
        let j = idx + 1;
        if j > 1 {
            let k = (2 * j - 1) as f64;
            rising *= (alpha + k - 2.0) * (alpha + k - 1.0);
            fact *= (2 * j - 1) as f64 * (2 * j) as f64;
            power /= m * m;
        }
        tail += b / fact * rising * power;
    }
    head + tail
}

pub fn build_couplings(params: &ModelParams) -> CouplingTable {
    let norm = harmonic_number(params.z, params.alpha);
    let j = (1..=params.z).map(|r| (r as f64).powf(-params.alpha) / norm).collect();
    CouplingTable { j, norm }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_number_examples() {
        assert_eq!(harmonic_number(1, 2.0), 1.0);
        assert_eq!(harmonic_number(3, 0.0), 3.0);
        let direct = 1.0 + 1.0 / 2.0 + 1.0 / 3.0 + 1.0 / 4.0;
        assert!((harmonic_number(4, 1.0) - direct).abs() < 1e-15);
        assert!((harmonic_number(4, 1.0) - 25.0 / 12.0).abs() < 1e-15);
    }

    /// Partial sum plus the integral bounds `int_{M+1}^inf <= tail <= int_M^inf`.
    fn zeta_bracket(alpha: f64, m: usize) -> (f64, f64) {
        let partial: f64 = (1..=m).rev().map(|r| (r as f64).powf(-alpha)).sum();
        let lo = ((m + 1) as f64).powf(1.0 - alpha) / (alpha - 1.0);
        let hi = (m as f64).powf(1.0 - alpha) / (alpha - 1.0);
        (partial + lo, partial + hi)
    }

    #[test]
    fn zeta_known_values() {
        let pi = std::f64::consts::PI;
        assert!((riemann_zeta(2.0).unwrap() - pi * pi / 6.0).abs() < 1e-13);
        assert!((riemann_zeta(4.0).unwrap() - pi.powi(4) / 90.0).abs() < 1e-13);
        assert!((riemann_zeta(60.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((riemann_zeta(1.5).unwrap() - 2.612_375_348_685_488).abs() < 1e-12);
        assert!((riemann_zeta(3.0).unwrap() - 1.202_056_903_159_594_3).abs() < 1e-13);
    }

    #[test]
    fn zeta_within_partial_sum_bracket() {
        for &alpha in &[1.1, 1.5, 2.0, 2.5, 3.0, 7.0] {
            let (lo, hi) = zeta_bracket(alpha, 200_000);
            let z = riemann_zeta(alpha).unwrap();
            assert!(z >= lo - 1e-12 && z <= hi + 1e-12, "alpha {alpha}: {lo} <= {z} <= {hi}");
        }
    }

    #[test]
    fn zeta_rejects_divergent_exponent() {
        assert!(matches!(riemann_zeta(1.0), Err(Error::Domain(_))));
        assert!(matches!(riemann_zeta(0.5), Err(Error::Domain(_))));
    }

    #[test]
    fn harmonic_approaches_zeta() {
        let zeta = riemann_zeta(1.5).unwrap();
        // the remainder behaves as 2/sqrt(Z) for alpha = 1.5
        let diff = zeta - harmonic_number(10_000, 1.5);
        assert!((diff - 2.0 / 100.0).abs() < 1e-4, "{diff}");
        let diff = zeta - harmonic_number(10_000_000, 1.5);
        assert!(diff > 0.0 && diff < 1e-3, "{diff}");
    }

    #[test]
    fn coupling_examples() {
        let p = ModelParams::new(5, 1, 0.7, 1.0).unwrap();
        assert_eq!(p.couplings().values(), &[1.0]);

        let p = ModelParams::new(5, 2, 1.0, 1.0).unwrap();
        let c = p.couplings();
        assert!((c.normalization() - 1.5).abs() < 1e-15);
        assert!((c.at(1) - 2.0 / 3.0).abs() < 1e-15);
        assert!((c.at(2) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(c.at(3), 0.0);

        let p = ModelParams::new(4, 3, 0.0, 1.0).unwrap();
        for &j in p.couplings().values() {
            assert!((j - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn params_validation() {
        assert!(ModelParams::new(1, 1, 1.0, 1.0).is_err());
        assert!(ModelParams::new(4, 4, 1.0, 1.0).is_err());
        assert!(ModelParams::new(4, 0, 1.0, 1.0).is_err());
        assert!(ModelParams::new(4, 3, -0.1, 1.0).is_err());
        assert!(ModelParams::new(4, 3, f64::NAN, 1.0).is_err());
        assert!(ModelParams::new(4, 3, 0.0, 1.0).is_ok());
    }

    #[test]
    fn json_defaults_to_fully_connected() {
        let p: ModelParams = serde_json::from_str(r#"{"n": 16, "alpha": 1.5, "h": 2.5}"#).unwrap();
        assert_eq!(p.z, 15);
        let p: ModelParams = serde_json::from_str(r#"{"n": 16, "z": 3, "alpha": 1.5, "h": 2.5}"#).unwrap();
        assert_eq!(p.z, 3);
        let back: ModelParams = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
        assert_eq!(back, p);
        assert!(serde_json::from_str::<ModelParams>(r#"{"n": 4, "z": 9, "alpha": 1.5, "h": 2.5}"#).is_err());
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn couplings_sum_to_one(n in 2usize..400, zf in 0.0f64..1.0, alpha in 0.0f64..6.0) {
                let z = 1 + ((n - 2) as f64 * zf) as usize;
                let p = ModelParams::new(n, z, alpha, 1.0).unwrap();
                let c = p.couplings();
                let s: f64 = c.values().iter().sum();
                prop_assert!((s - 1.0).abs() < 1e-12);
                prop_assert!(c.normalization() > 0.0);
                for w in c.values().windows(2) {
                    if alpha > 0.0 { prop_assert!(w[1] < w[0]); } else { prop_assert_eq!(w[1], w[0]); }
                }
            }

            #[test]
            fn tail_thins_with_alpha(z in 2usize..200, a1 in 0.0f64..4.0, da in 0.0f64..3.0) {
                let n = z + 1;
                let lo = ModelParams::new(n, z, a1, 1.0).unwrap().couplings();
                let hi = ModelParams::new(n, z, a1 + da, 1.0).unwrap().couplings();
                prop_assert!(hi.at(1) >= lo.at(1) * (1.0 - 1e-12));
                prop_assert!(hi.at(z) <= lo.at(z) * (1.0 + 1e-12));
                for r in 2..=z {
                    prop_assert!(hi.at(r) / hi.at(1) <= lo.at(r) / lo.at(1) * (1.0 + 1e-12));
                }
            }
        }
    }
}
