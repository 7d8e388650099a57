//! Acceptance criteria, one test per criterion. Thresholds are fixed here;
//! each test prints a PASS/FAIL verdict line with its measured values.

use std::f64::consts::PI;
use std::time::Instant;

use lrising::analysis::{find_zc, fit_power_law, scan, GridSpec, ScanOutput, DEFAULT_MATCH_TOLERANCE};
use lrising::entanglement::pair_measure;
use lrising::momentum::{dispersion, thermodynamic_critical_field_pi, verify_gap_closing, CouplingSource, KGrid};
use lrising::oracle::{equivalence_suite, SpinState};
use lrising::{
    concurrence, entanglement_profile, harmonic_number, log_negativity, monogamy_score, CorrelationData,
    EntanglementProfile, Error, Measure, ModelParams, TwoSiteState,
};
use lrising_validation::Verdict;
use nalgebra::{Matrix4, Vector4};

const CHAIN: usize = 256;
const FIELD: f64 = 2.5;

const ORACLE_SEED: u64 = 7;
const ORACLE_POINTS: usize = 50;
const ORACLE_TOLERANCE: f64 = 1e-8;
const ORACLE_BUDGET_SECS: f64 = 120.0;

const CRITICAL_TOLERANCE: f64 = 1e-6;

const SLOPE_WINDOW: (f64, f64) = (1e-3, 1e-1);
const SLOPE_TOLERANCE: f64 = 0.05;

const QUASI_LOCAL_ALPHA: f64 = 1.5;
const QUASI_LOCAL_EXPONENT: f64 = -0.53;
const QUASI_LOCAL_EXPONENT_TOLERANCE: f64 = 0.07;
const NON_LOCAL_ALPHAS: [f64; 2] = [0.4, 0.6];

const SCALING_TOLERANCE: f64 = 0.15;

const MONOGAMY_CHAIN: usize = 128;
const MONOGAMY_FIELDS: [f64; 2] = [1.5, 2.5];
const MONOGAMY_Z: (usize, usize) = (5, 60);
const FLAT_LIMIT: f64 = 0.02;
const SATURATION_LIMIT: f64 = 0.01;
const DECAY_RATIO: f64 = 0.9;
const MONOGAMY_FLOOR: f64 = -1e-9;

const SATURATION_SIZES: (usize, usize) = (512, 1024);
const SATURATION_DISTANCE: usize = 4;
const SATURATION_CHANGE: f64 = 0.01;

const SANITY_TOLERANCE: f64 = 1e-9;

fn params(n: usize, z: usize, alpha: f64, h: f64) -> ModelParams {
    ModelParams::new(n, z, alpha, h).unwrap()
}

fn full_profile(n: usize, alpha: f64, h: f64) -> EntanglementProfile {
    entanglement_profile(&params(n, n - 1, alpha, h), Measure::LogNegativity, 1).unwrap()
}

#[test]
fn criterion_01_oracle_equivalence() {
    let mut v = Verdict::new(1, "free-fermion path matches exact diagonalization");
    let start = Instant::now();
    let report = equivalence_suite(ORACLE_SEED, ORACLE_POINTS).unwrap();
    let secs = start.elapsed().as_secs_f64();
    v.check(
        format!("{} points drawn with seed {ORACLE_SEED}", report.points.len()),
        report.points.len() == ORACLE_POINTS,
    );
    let gapped = report.points.iter().all(|p| p.gap > 1e-6 && (p.params.h - 2.0).abs() >= 0.05);
    v.check("every point gapped and away from h = 2", gapped);
    for (name, dev) in report.max.named() {
        v.check(format!("{name}: max deviation {dev:.2e} < {ORACLE_TOLERANCE:e}"), dev < ORACLE_TOLERANCE);
    }
    v.check(format!("runtime {secs:.1}s < {ORACLE_BUDGET_SECS}s"), secs < ORACLE_BUDGET_SECS);
    v.finish();
}

fn closed_form_critical_field(z: usize, alpha: f64) -> f64 {
    let alternating: f64 = (1..=z).map(|r| if r % 2 == 0 { 1.0 } else { -1.0 } * (r as f64).powf(-alpha)).sum();
    2.0 * alternating / harmonic_number(z, alpha)
}

#[test]
fn criterion_02_critical_points() {
    let mut v = Verdict::new(2, "gap-closing fields agree with the closed forms");
    let mut worst_pi: f64 = 0.0;
    let mut worst_zero: f64 = 0.0;
    for z in [1, 2, 5, 20] {
        for alpha in [0.5, 1.5, 3.0] {
            let source = CouplingSource::finite(&params(CHAIN, z, alpha, 2.0));
            let expected = closed_form_critical_field(z, alpha);
            let root_pi = verify_gap_closing(&source, PI, expected - 0.5, expected + 0.5).unwrap();
            worst_pi = worst_pi.max((root_pi - expected).abs());
            let root_zero = verify_gap_closing(&source, 0.0, 1.5, 2.5).unwrap();
            worst_zero = worst_zero.max((root_zero - 2.0).abs());
        }
    }
    v.check(
        format!("k = pi roots vs closed form over 12 (Z, alpha): max |diff| {worst_pi:.2e}"),
        worst_pi < CRITICAL_TOLERANCE,
    );
    v.check(
        format!("k = 0 roots vs 2 over 12 (Z, alpha): max |diff| {worst_zero:.2e}"),
        worst_zero < CRITICAL_TOLERANCE,
    );

    let at_one = thermodynamic_critical_field_pi(1.0).unwrap();
    v.check(format!("infinite range, alpha = 1: h_c = {at_one:e}"), at_one.abs() < CRITICAL_TOLERANCE);
    let steep = CouplingSource::thermodynamic(60.0).unwrap();
    let root_steep = verify_gap_closing(&steep, PI, -3.0, -1.0).unwrap();
    v.check(
        format!("infinite range, alpha = 60: root {root_steep:.9} vs -2"),
        (root_steep + 2.0).abs() < CRITICAL_TOLERANCE,
    );
    let mid = CouplingSource::thermodynamic(1.5).unwrap();
    let expected_mid = thermodynamic_critical_field_pi(1.5).unwrap();
    let root_mid = verify_gap_closing(&mid, PI, expected_mid - 0.5, expected_mid + 0.5).unwrap();
    v.check(
        format!("infinite range, alpha = 1.5: root {root_mid:.9} vs {expected_mid:.9}"),
        (root_mid - expected_mid).abs() < CRITICAL_TOLERANCE,
    );
    v.finish();
}

#[test]
fn criterion_03_dispersion_exponent() {
    let mut v = Verdict::new(3, "small-k dispersion exponents at h = 2");
    let grid = KGrid::Log { lo: SLOPE_WINDOW.0, hi: SLOPE_WINDOW.1, points: 41 };
    let p = params(CHAIN, CHAIN - 1, QUASI_LOCAL_ALPHA, 2.0);
    let infinite = dispersion(&p, &grid, true).unwrap().log_log_slope(SLOPE_WINDOW.0, SLOPE_WINDOW.1).unwrap();
    v.check(
        format!("infinite range, alpha = 1.5: slope {infinite:.4} vs 0.5 +- {SLOPE_TOLERANCE}"),
        (infinite - 0.5).abs() <= SLOPE_TOLERANCE,
    );
    let few = dispersion(&p.with_z(20).unwrap(), &grid, false)
        .unwrap()
        .log_log_slope(SLOPE_WINDOW.0, SLOPE_WINDOW.1)
        .unwrap();
    v.check(
        format!("Z = 20, alpha = 1.5: slope {few:.4} vs 1 +- {SLOPE_TOLERANCE}"),
        (few - 1.0).abs() <= SLOPE_TOLERANCE,
    );
    v.finish();
}

#[test]
fn criterion_04_finite_range_mimicry() {
    let mut v = Verdict::new(4, "finite-range mimicry at N = 256, h = 2.5");
    let target = full_profile(CHAIN, QUASI_LOCAL_ALPHA, FIELD);
    let fit = fit_power_law(&target).unwrap();
    v.check(
        format!(
            "alpha = 1.5, Z = 255: fitted exponent {:.3} over r = {}..{} vs {QUASI_LOCAL_EXPONENT} +- {QUASI_LOCAL_EXPONENT_TOLERANCE}",
            fit.exponent, fit.r_range.0, fit.r_range.1
        ),
        (fit.exponent - QUASI_LOCAL_EXPONENT).abs() <= QUASI_LOCAL_EXPONENT_TOLERANCE,
    );
    let base = params(CHAIN, CHAIN - 1, QUASI_LOCAL_ALPHA, FIELD);
    let diff = |z: usize| {
        entanglement_profile(&base.with_z(z).unwrap(), Measure::LogNegativity, 1).unwrap().max_abs_diff(&target)
    };
    let (d20, d5) = (diff(20), diff(5));
    v.check(
        format!("alpha = 1.5: Z = 20 vs Z = 255 max |diff| {d20:.3e} <= {DEFAULT_MATCH_TOLERANCE:e}"),
        d20 <= DEFAULT_MATCH_TOLERANCE,
    );
    v.check(
        format!("alpha = 1.5: Z = 5 vs Z = 255 max |diff| {d5:.3e} > {DEFAULT_MATCH_TOLERANCE:e}"),
        d5 > DEFAULT_MATCH_TOLERANCE,
    );
    for alpha in NON_LOCAL_ALPHAS {
        let outcome = find_zc(&params(CHAIN, CHAIN - 1, alpha, FIELD), DEFAULT_MATCH_TOLERANCE);
        let label = match &outcome {
            Ok(search) => format!("alpha = {alpha}: unexpected match at Z_c = {}", search.zc),
            Err(e) => format!("alpha = {alpha}: {e}"),
        };
        v.check(label, matches!(outcome, Err(Error::NoMatch { .. })));
    }
    v.finish();
}

/// Ordinary least-squares slope of `ln E_r` against `ln r` for `r <= r_max`.
fn small_r_slope(profile: &EntanglementProfile, r_max: usize) -> f64 {
    let pts: Vec<(f64, f64)> = profile.entries.iter().take(r_max).map(|&(r, e)| ((r as f64).ln(), e.ln())).collect();
    let n = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

#[test]
fn criterion_05_non_local_scaling() {
    let mut v = Verdict::new(5, "decreasing-segment exponent tracks -alpha at N = 256, h = 2.5");
    for alpha in NON_LOCAL_ALPHAS {
        let profile = full_profile(CHAIN, alpha, FIELD);
        let fit = fit_power_law(&profile).unwrap();
        v.check(
            format!(
                "alpha = {alpha}: exponent {:.3} over r = {}..{}, |exponent + alpha| = {:.3} <= {SCALING_TOLERANCE}",
                fit.exponent,
                fit.r_range.0,
                fit.r_range.1,
                (fit.exponent + alpha).abs()
            ),
            (fit.exponent + alpha).abs() <= SCALING_TOLERANCE,
        );
        v.note(format!("alpha = {alpha}: slope over r = 1..10 only is {:.3}", small_r_slope(&profile, 10)));
    }
    v.finish();
}

#[test]
fn criterion_06_u_shape() {
    let mut v = Verdict::new(6, "non-monotonic tail at N = 128, alpha = 0.4, h = 2.5");
    let profile = full_profile(MONOGAMY_CHAIN, 0.4, FIELD);
    let positive: Vec<(usize, f64)> = profile.entries.iter().copied().filter(|&(_, e)| e > 0.0).collect();
    let &(r_min, e_min) = positive.iter().min_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
    let later = positive.iter().filter(|&&(r, e)| r > r_min && e > e_min).max_by(|a, b| a.1.total_cmp(&b.1));
    let detail = match later {
        Some(&(r, e)) => format!("minimum E_{r_min} = {e_min:.4e} rises to E_{r} = {e:.4e}"),
        None => format!("minimum E_{r_min} = {e_min:.4e} is never exceeded further out"),
    };
    v.check(detail, later.is_some() && e_min > 0.0);
    v.finish();
}

#[test]
fn criterion_07_monogamy_trends() {
    let mut v = Verdict::new(7, "monogamy score against Z at N = 128");
    let (z_lo, z_hi) = MONOGAMY_Z;
    let mut floor = f64::INFINITY;
    for h in MONOGAMY_FIELDS {
        let sweep = |alpha: f64| -> Vec<f64> {
            (z_lo..=z_hi).map(|z| monogamy_score(&params(MONOGAMY_CHAIN, z, alpha, h)).unwrap().delta).collect()
        };
        let at = |deltas: &[f64], z: usize| deltas[z - z_lo];

        let steep = sweep(3.0);
        let (lo, hi) = steep.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &d| (a.min(d), b.max(d)));
        let spread = (hi - lo) / hi;
        v.check(
            format!("h = {h}, alpha = 3: relative spread {:.2}% < {}%", 100.0 * spread, 100.0 * FLAT_LIMIT),
            spread < FLAT_LIMIT,
        );

        let quasi = sweep(1.5);
        let settle = (at(&quasi, 40) - at(&quasi, 60)).abs() / at(&quasi, 60);
        v.check(
            format!(
                "h = {h}, alpha = 1.5: |d(40) - d(60)| / d(60) = {:.2}% < {}%",
                100.0 * settle,
                100.0 * SATURATION_LIMIT
            ),
            settle < SATURATION_LIMIT,
        );

        let non_local = sweep(0.5);
        let ratio = at(&non_local, 60) / at(&non_local, 20);
        v.check(format!("h = {h}, alpha = 0.5: d(60) / d(20) = {ratio:.3} < {DECAY_RATIO}"), ratio < DECAY_RATIO);

        v.note(format!(
            "h = {h}: d(Z = 5, 20, 40, 60) = alpha 3: {:.5} {:.5} {:.5} {:.5}; alpha 1.5: {:.5} {:.5} {:.5} {:.5}",
            at(&steep, 5),
            at(&steep, 20),
            at(&steep, 40),
            at(&steep, 60),
            at(&quasi, 5),
            at(&quasi, 20),
            at(&quasi, 40),
            at(&quasi, 60)
        ));
        floor = [&steep, &quasi, &non_local].iter().flat_map(|d| d.iter()).fold(floor, |m, &d| m.min(d));
    }
    v.check(format!("smallest score {floor:.4e} >= {MONOGAMY_FLOOR:e}"), floor >= MONOGAMY_FLOOR);
    v.finish();
}

#[test]
fn criterion_08_saturation_with_size() {
    let mut v = Verdict::new(8, "E_4 saturates with N at alpha = 1.5, h = 2.5");
    let e4 = |n: usize| {
        let data = CorrelationData::from_params(&params(n, n - 1, QUASI_LOCAL_ALPHA, FIELD)).unwrap();
        pair_measure(&data, 1, 1 + SATURATION_DISTANCE, Measure::LogNegativity).unwrap()
    };
    let (small, large) = (e4(SATURATION_SIZES.0), e4(SATURATION_SIZES.1));
    let change = (large - small).abs() / large;
    v.check(
        format!(
            "E_4(N = {}) = {small:.6e}, E_4(N = {}) = {large:.6e}, change {:.3}% < {}%",
            SATURATION_SIZES.0,
            SATURATION_SIZES.1,
            100.0 * change,
            100.0 * SATURATION_CHANGE
        ),
        change < SATURATION_CHANGE,
    );
    v.finish();
}

fn pure_pair(amplitudes: [f64; 4]) -> TwoSiteState {
    let psi = Vector4::from(amplitudes).normalize();
    TwoSiteState::from_matrix(psi * psi.transpose(), 1, 2)
}

#[test]
fn criterion_09_measure_sanity() {
    let mut v = Verdict::new(9, "entanglement measures on textbook states");
    let close = |a: f64, b: f64| (a - b).abs() <= SANITY_TOLERANCE;

    let bell = pure_pair([1.0, 0.0, 0.0, 1.0]);
    let (c, e) = (concurrence(&bell), log_negativity(&bell));
    v.check(format!("Bell: C = {c:.12}, E = {e:.12}"), close(c, 1.0) && close(e, 1.0));

    let product = pure_pair([1.0, 0.0, 0.0, 0.0]);
    let (c, e) = (concurrence(&product), log_negativity(&product));
    v.check(format!("product: C = {c:.3e}, E = {e:.3e}"), close(c, 0.0) && close(e, 0.0));

    let p = 2.0 / 3.0;
    let singlet = Vector4::new(0.0, 1.0, -1.0, 0.0).normalize();
    let werner =
        TwoSiteState::from_matrix(singlet * singlet.transpose() * p + Matrix4::identity() * ((1.0 - p) / 4.0), 1, 2);
    let c = concurrence(&werner);
    v.check(format!("Werner p = 2/3: C = {c:.12}"), close(c, 0.5));

    let s2 = std::f64::consts::FRAC_1_SQRT_2;
    let ghz = SpinState::new(3, vec![s2, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, s2]).monogamy().delta;
    v.check(format!("GHZ3: delta = {ghz:.12}"), close(ghz, 1.0));

    let s3 = 1.0 / 3f64.sqrt();
    let w = SpinState::new(3, vec![0.0, s3, s3, 0.0, s3, 0.0, 0.0, 0.0]).monogamy().delta;
    v.check(format!("W3: delta = {w:.3e}"), close(w, 0.0));
    v.finish();
}

#[test]
fn criterion_10_scan_determinism() {
    let mut v = Verdict::new(10, "repeated scans give byte-identical CSV");
    let spec = determinism_grid();
    let render = || {
        let mut buf = Vec::new();
        scan(&spec).write_csv(&mut buf).unwrap();
        buf
    };
    let (first, second) = (render(), render());
    let rows = first.iter().filter(|&&b| b == b'\n').count() - 1;
    v.check(format!("{rows} rows, {} bytes, identical: {}", first.len(), first == second), first == second);
    v.check(format!("{rows} rows for {} grid points", spec.points().len()), rows == spec.points().len());
    v.finish();
}

fn determinism_grid() -> GridSpec {
    GridSpec {
        n: vec![24, 40],
        z: Some(vec![3, 23]),
        alpha: vec![0.5, 1.5],
        h: vec![1.5, 2.5],
        outputs: vec![
            ScanOutput::Range,
            ScanOutput::Fit,
            ScanOutput::Monogamy,
            ScanOutput::Energy,
            ScanOutput::Critical,
            ScanOutput::Slope,
            ScanOutput::Entries,
        ],
        measure: Measure::LogNegativity,
        anchor: 1,
        r: vec![1, 2, 5],
        thermodynamic: true,
    }
}
