//! Profile post-processing: entanglement range, power-law fits, the
//! finite-range mimicry search and grid sweeps.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::Write;
use std::str::FromStr;

use crate::bogoliubov::diagonalize;
use crate::correlators::{correlation_matrix, CorrelationData};
use crate::entanglement::{
    entanglement_profile, monogamy_from_data, profile_from_data, EntanglementProfile, Measure, ZERO_ENTANGLEMENT,
};
use crate::error::{Error, Result};
use crate::format_float;
use crate::model::ModelParams;
use crate::momentum::{dispersion, thermodynamic_critical_field_pi, CouplingSource, KGrid};
use crate::quadratic::QuadraticForm;

pub const DEFAULT_MATCH_TOLERANCE: f64 = 1e-3;

/// Smallest `r*` with `E_r < 1e-8` for every `r >= r*`; `N - anchor` when
/// the last entry is still entangled.
pub fn entanglement_range(profile: &EntanglementProfile) -> usize {
    match profile.entries.iter().rposition(|&(_, e)| e >= ZERO_ENTANGLEMENT) {
        None => 1,
        Some(last) if last + 1 == profile.entries.len() => profile.entries[last].0,
        Some(last) => profile.entries[last].0 + 1,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub intercept: f64,
    pub r_range: (usize, usize),
    /// RMS of the residuals of `ln E_r`.
    pub residual: f64,
}

impl PowerLawFit {
    pub fn points(&self) -> usize {
        self.r_range.1 - self.r_range.0 + 1
    }
}

/// Ordinary least squares of `ln E_r` on `ln r` over the longest initial
/// run where `E_r` is above `1e-8` and strictly decreasing.
pub fn fit_power_law(profile: &EntanglementProfile) -> Result<PowerLawFit> {
    let mut segment: Vec<(usize, f64)> = Vec::new();
    for &(r, e) in &profile.entries {
        if e <= ZERO_ENTANGLEMENT || segment.last().is_some_and(|&(_, prev)| e >= prev) {
            break;
        }
        segment.push((r, e));
    }
    if segment.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "power-law fit needs 3 decreasing entries above {ZERO_ENTANGLEMENT:e}, found {}",
            segment.len()
        )));
    }
    let pts: Vec<(f64, f64)> = segment.iter().map(|&(r, e)| ((r as f64).ln(), e.ln())).collect();
    let count = pts.len() as f64;
    let mean_x = pts.iter().map(|p| p.0).sum::<f64>() / count;
    let mean_y = pts.iter().map(|p| p.1).sum::<f64>() / count;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let exponent = sxy / sxx;
    let intercept = mean_y - exponent * mean_x;
    let residual = (pts.iter().map(|p| (p.1 - intercept - exponent * p.0).powi(2)).sum::<f64>() / count).sqrt();
    Ok(PowerLawFit { exponent, intercept, r_range: (segment[0].0, segment[segment.len() - 1].0), residual })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MimicryReport {
    pub candidate_z: usize,
    pub max_abs_diff: f64,
    pub rc_target: usize,
    pub rc_candidate: usize,
    /// Within tolerance everywhere and vanishing at the same range.
    pub matched: bool,
}

fn compare_profiles(target: &EntanglementProfile, candidate: &EntanglementProfile, tolerance: f64) -> MimicryReport {
    let max_abs_diff = candidate.max_abs_diff(target);
    let rc_target = entanglement_range(target);
    let rc_candidate = entanglement_range(candidate);
    MimicryReport {
        candidate_z: candidate.params.z,
        max_abs_diff,
        rc_target,
        rc_candidate,
        matched: max_abs_diff <= tolerance && rc_target == rc_candidate,
    }
}

fn check_tolerance(tolerance: f64) -> Result<()> {
    if tolerance > 0.0 && tolerance.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!("tolerance must be positive, got {tolerance}")))
    }
}

/// Reports for an explicit list of candidate ranges against the fully
/// connected chain with the same `(N, alpha, h)`.
pub fn mimicry_reports(params: &ModelParams, candidates: &[usize], tolerance: f64) -> Result<Vec<MimicryReport>> {
    check_tolerance(tolerance)?;
    let full = params.with_z(params.n - 1)?;
    let target = entanglement_profile(&full, Measure::LogNegativity, 1)?;
    candidates
        .iter()
        .map(|&z| {
            let candidate = entanglement_profile(&params.with_z(z)?, Measure::LogNegativity, 1)?;
            Ok(compare_profiles(&target, &candidate, tolerance))
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct ZcSearch {
    pub target: EntanglementProfile,
    pub reports: Vec<MimicryReport>,
    pub zc: usize,
}

/// Largest candidate range tried before giving up.
pub fn zc_search_cap(n: usize) -> usize {
    (n / 4).clamp(1, n.saturating_sub(2).max(1))
}

/// Ascend `Z = 1, 2, ...` until a candidate matches the fully connected
/// profile. Gives up with [`Error::NoMatch`] past `N / 4`.
pub fn find_zc(params: &ModelParams, tolerance: f64) -> Result<ZcSearch> {
    check_tolerance(tolerance)?;
    if params.z != params.n - 1 {
        return Err(Error::InvalidParams(format!(
            "Z_c search needs the fully connected target Z = {}, got Z = {}",
            params.n - 1,
            params.z
        )));
    }
    let target = entanglement_profile(params, Measure::LogNegativity, 1)?;
    let cap = zc_search_cap(params.n);
    let mut reports = Vec::new();
    for z in 1..=cap.min(params.n - 2) {
        let candidate = entanglement_profile(&params.with_z(z)?, Measure::LogNegativity, 1)?;
        let report = compare_profiles(&target, &candidate, tolerance);
        reports.push(report);
        if report.matched {
            return Ok(ZcSearch { target, reports, zc: z });
        }
    }
    Err(Error::NoMatch { max_z: cap })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RetunedMatch {
    pub alpha: f64,
    pub max_abs_diff: f64,
}

/// Grid search over `alpha'` for the `candidate_z`-range chain whose
/// profile is closest (max-abs) to the target's. Ties keep the earlier grid
/// value.
pub fn retuned_mimicry(target: &ModelParams, candidate_z: usize, alpha_grid: &[f64]) -> Result<RetunedMatch> {
    if alpha_grid.is_empty() {
        return Err(Error::InvalidParams("empty alpha grid".into()));
    }
    if candidate_z > target.z {
        return Err(Error::InvalidParams(format!("candidate range {candidate_z} exceeds the target's {}", target.z)));
    }
    let reference = entanglement_profile(target, Measure::LogNegativity, 1)?;
    let diffs = alpha_grid
        .par_iter()
        .map(|&alpha| {
            let p = ModelParams::new(target.n, candidate_z, alpha, target.h)?;
            Ok(entanglement_profile(&p, Measure::LogNegativity, 1)?.max_abs_diff(&reference))
        })
        .collect::<Result<Vec<f64>>>()?;
    let best = (0..diffs.len()).fold(0, |b, i| if diffs[i] < diffs[b] { i } else { b });
    Ok(RetunedMatch { alpha: alpha_grid[best], max_abs_diff: diffs[best] })
}

/// Column groups a scan can emit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanOutput {
    /// `r_c`.
    Range,
    /// Power-law fit of the profile.
    Fit,
    /// One-tangle, pairwise sum and monogamy score.
    Monogamy,
    /// Free-fermion ground-state energy.
    Energy,
    /// `k = pi` critical field.
    Critical,
    /// Log-log slope of `omega_k` at small `k`.
    Slope,
    /// `E_r` at the distances listed in `r`.
    Entries,
}

impl FromStr for ScanOutput {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| Error::InvalidParams(format!("unknown scan output '{s}'")))
    }
}

fn default_outputs() -> Vec<ScanOutput> {
    vec![ScanOutput::Range, ScanOutput::Fit, ScanOutput::Monogamy]
}

fn default_anchor() -> usize {
    1
}

/// JSON grid description for [`scan`].
///
/// ```json
/// {"n": [64], "z": [1, 5, 63], "alpha": [0.5, 1.5], "h": [2.5],
///  "outputs": ["range", "fit", "monogamy", "entries"], "r": [1, 4]}
/// ```
///
/// Omitting `z` means the fully connected chain for every `N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub n: Vec<usize>,
    #[serde(default)]
    pub z: Option<Vec<usize>>,
    pub alpha: Vec<f64>,
    pub h: Vec<f64>,
    #[serde(default = "default_outputs")]
    pub outputs: Vec<ScanOutput>,
    #[serde(default)]
    pub measure: Measure,
    #[serde(default = "default_anchor")]
    pub anchor: usize,
    #[serde(default)]
    pub r: Vec<usize>,
    /// Use infinite-range couplings for `critical` and `slope`.
    #[serde(default)]
    pub thermodynamic: bool,
}

impl GridSpec {
    fn sorted_f64(values: &[f64]) -> Vec<f64> {
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }

    /// Grid points in lexicographic `(N, Z, alpha, h)` order. Invalid
    /// combinations are kept so the sweep can flag them.
    pub fn points(&self) -> Vec<(usize, usize, f64, f64)> {
        let mut ns = self.n.clone();
        ns.sort_unstable();
        ns.dedup();
        let alphas = Self::sorted_f64(&self.alpha);
        let hs = Self::sorted_f64(&self.h);
        let mut out = Vec::new();
        for &n in &ns {
            let mut zs = self.z.clone().unwrap_or_else(|| vec![n.saturating_sub(1)]);
            zs.sort_unstable();
            zs.dedup();
            for &z in &zs {
                for &alpha in &alphas {
                    for &h in &hs {
                        out.push((n, z, alpha, h));
                    }
                }
            }
        }
        out
    }

    fn selected(&self) -> Vec<ScanOutput> {
        let mut o = self.outputs.clone();
        o.sort();
        o.dedup();
        o
    }

    pub fn columns(&self) -> Vec<String> {
        let mut cols: Vec<String> = ["n", "z", "alpha", "h", "status"].map(String::from).to_vec();
        for out in self.selected() {
            match out {
                ScanOutput::Range => cols.push("r_c".into()),
                ScanOutput::Fit => cols.extend(
                    ["fit_exponent", "fit_intercept", "fit_r_min", "fit_r_max", "fit_residual"].map(String::from),
                ),
                ScanOutput::Monogamy => cols.extend(["one_tangle", "pairwise_sum", "delta"].map(String::from)),
                ScanOutput::Energy => cols.push("ground_energy".into()),
                ScanOutput::Critical => cols.push("h_c_pi".into()),
                ScanOutput::Slope => cols.push("dispersion_slope".into()),
                ScanOutput::Entries => cols.extend(self.r.iter().map(|r| format!("E_{r}"))),
            }
        }
        cols
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    pub n: usize,
    pub z: usize,
    pub alpha: f64,
    pub h: f64,
    /// `"ok"` or the first error met on this point.
    pub status: String,
    /// One cell per output column; `None` where that quantity failed.
    pub values: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanTable {
    pub columns: Vec<String>,
    pub rows: Vec<ScanRow>,
}

const SLOPE_WINDOW: (f64, f64) = (1e-3, 1e-1);

type Solved = (f64, CorrelationData);

fn scan_point(spec: &GridSpec, n: usize, z: usize, alpha: f64, h: f64) -> ScanRow {
    let outputs = spec.selected();
    let needs = |pred: fn(&ScanOutput) -> bool| outputs.iter().any(pred);
    let params = ModelParams::new(n, z, alpha, h);
    let solved: Result<Option<Solved>> = params.clone().and_then(|p| {
        if !needs(|o| !matches!(o, ScanOutput::Critical | ScanOutput::Slope)) {
            return Ok(None);
        }
        let sol = diagonalize(&QuadraticForm::from_params(&p))?;
        let mut data = correlation_matrix(&sol);
        data.params = Some(p);
        Ok(Some((sol.ground_energy(), data)))
    });
    let model = || -> Result<&Solved> {
        let solved = solved.as_ref().map_err(Error::clone)?;
        Ok(solved.as_ref().expect("solution computed for model outputs"))
    };
    let profile = match (&params, &solved) {
        (Ok(p), Ok(Some((_, data))))
            if needs(|o| matches!(o, ScanOutput::Range | ScanOutput::Fit | ScanOutput::Entries)) =>
        {
            Some(profile_from_data(data, p, spec.measure, spec.anchor))
        }
        _ => None,
    };
    let profile = || -> Result<&EntanglementProfile> {
        model()?;
        profile.as_ref().expect("profile computed for profile outputs").as_ref().map_err(Error::clone)
    };

    let mut errors: Vec<Error> = Vec::new();
    let mut values: Vec<Option<f64>> = Vec::new();
    for out in &outputs {
        let (width, res): (usize, Result<Vec<f64>>) = match out {
            ScanOutput::Range => (1, profile().map(|p| vec![entanglement_range(p) as f64])),
            ScanOutput::Fit => (
                5,
                profile()
                    .and_then(fit_power_law)
                    .map(|f| vec![f.exponent, f.intercept, f.r_range.0 as f64, f.r_range.1 as f64, f.residual]),
            ),
            ScanOutput::Entries => (
                spec.r.len(),
                profile().and_then(|p| {
                    spec.r
                        .iter()
                        .map(|&r| {
                            p.get(r).ok_or_else(|| {
                                Error::InvalidParams(format!(
                                    "r = {r} outside the profile of length {}",
                                    p.entries.len()
                                ))
                            })
                        })
                        .collect()
                }),
            ),
            ScanOutput::Monogamy => (
                3,
                model().and_then(|(_, data)| {
                    if n < 3 {
                        return Err(Error::InvalidParams("monogamy score needs N >= 3".into()));
                    }
                    let m = monogamy_from_data(data)?;
                    Ok(vec![m.one_tangle, m.pairwise_sum, m.delta])
                }),
            ),
            ScanOutput::Energy => (1, model().map(|(energy, _)| vec![*energy])),
            ScanOutput::Critical => (
                1,
                if spec.thermodynamic {
                    thermodynamic_critical_field_pi(alpha).map(|v| vec![v])
                } else {
                    params.clone().map(|p| vec![CouplingSource::finite(&p).critical_field_pi()])
                },
            ),
            ScanOutput::Slope => (
                1,
                params.clone().and_then(|p| {
                    let grid = KGrid::Log { lo: SLOPE_WINDOW.0, hi: SLOPE_WINDOW.1, points: 41 };
                    let curve = dispersion(&p, &grid, spec.thermodynamic)?;
                    Ok(vec![curve.log_log_slope(SLOPE_WINDOW.0, SLOPE_WINDOW.1)?])
                }),
            ),
        };
        match res {
            Ok(v) => values.extend(v.into_iter().map(Some)),
            Err(e) => {
                errors.push(e);
                values.extend(std::iter::repeat_n(None, width));
            }
        }
    }
    let status = match errors.into_iter().next() {
        None => "ok".to_string(),
        Some(e) => format!("error: {e}"),
    };
    ScanRow { n, z, alpha, h, status, values }
}

/// Evaluate the grid. Points run in parallel, rows come back in
/// [`GridSpec::points`] order, and failures are recorded per row.
pub fn scan(spec: &GridSpec) -> ScanTable {
    let rows = spec.points().into_par_iter().map(|(n, z, alpha, h)| scan_point(spec, n, z, alpha, h)).collect();
    ScanTable { columns: spec.columns(), rows }
}

impl ScanRow {
    pub fn cells(&self) -> Vec<String> {
        let mut cells = vec![
            self.n.to_string(),
            self.z.to_string(),
            format_float(self.alpha),
            format_float(self.h),
            self.status.clone(),
        ];
        cells.extend(self.values.iter().map(|v| v.map(format_float).unwrap_or_default()));
        cells
    }
}

fn csv_field(cell: &str) -> std::borrow::Cow<'_, str> {
    if cell.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", cell.replace('"', "\"\"")).into()
    } else {
        cell.into()
    }
}

impl ScanTable {
    /// Comma-separated, header first, one row per line, fields quoted only
    /// where needed.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let header: Vec<_> = self.columns.iter().map(|c| csv_field(c)).collect();
        writeln!(out, "{}", header.join(","))?;
        for row in &self.rows {
            let cells = row.cells();
            let fields: Vec<_> = cells.iter().map(|c| csv_field(c)).collect();
            writeln!(out, "{}", fields.join(","))?;
        }
        Ok(())
    }

    pub fn failed_rows(&self) -> usize {
        self.rows.iter().filter(|r| r.status != "ok").count()
    }

    /// Records as JSON objects keyed by column name; failed cells are null.
    pub fn records(&self) -> Vec<BTreeMap<String, serde_json::Value>> {
        self.rows
            .iter()
            .map(|row| {
                let mut rec = BTreeMap::new();
                rec.insert("n".to_string(), row.n.into());
                rec.insert("z".to_string(), row.z.into());
                rec.insert("alpha".to_string(), row.alpha.into());
                rec.insert("h".to_string(), row.h.into());
                rec.insert("status".to_string(), row.status.clone().into());
                for (col, v) in self.columns[5..].iter().zip(&row.values) {
                    rec.insert(col.clone(), v.map_or(serde_json::Value::Null, serde_json::Value::from));
                }
                rec
            })
            .collect()
    }
}
