use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use lrising::analysis::{scan, GridSpec};
use lrising::entanglement::profile_from_data;
use lrising::momentum::{dispersion, group_velocity, KGrid};
use lrising::oracle::equivalence_suite;
use lrising::{correlation_matrix, diagonalize, monogamy_score, CorrelationData, Measure, ModelParams, QuadraticForm};

mod output;

use output::{Cell, Format, Sink, Table};

const ORACLE_TOLERANCE: f64 = 1e-8;

/// Free-fermion solver for the long-range extended Ising chain.
#[derive(Debug, Parser)]
#[command(name = "lrising", version, about)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// Chain length N.
    #[arg(long, global = true, default_value_t = 256)]
    n: usize,

    /// Coordination number Z (interaction range); defaults to N - 1.
    #[arg(long, global = true)]
    z: Option<usize>,

    /// Power-law exponent of the couplings.
    #[arg(long, global = true, default_value_t = 1.5)]
    alpha: f64,

    /// Transverse field.
    #[arg(long, global = true, default_value_t = 2.5, allow_hyphen_values = true)]
    h: f64,

    /// Anchor site (1-based) for pair quantities.
    #[arg(long, global = true, default_value_t = 1)]
    anchor: usize,

    /// Two-site entanglement measure.
    #[arg(long, global = true, value_enum, default_value_t = MeasureArg::Logneg)]
    measure: MeasureArg,

    /// Acceptance threshold; for oracle-check the largest tolerated deviation (default 1e-8).
    #[arg(long, global = true)]
    tolerance: Option<f64>,

    /// Worker threads for parallel sweeps (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Seed for randomized point sampling.
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,

    /// Output file, written atomically; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MeasureArg {
    Logneg,
    Concurrence,
}

impl From<MeasureArg> for Measure {
    fn from(m: MeasureArg) -> Self {
        match m {
            MeasureArg::Logneg => Measure::LogNegativity,
            MeasureArg::Concurrence => Measure::Concurrence,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum GridKind {
    /// k = q pi / N for odd q.
    HalfInteger,
    Uniform,
    Log,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SweepAxis {
    Z,
    H,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Quasiparticle dispersion: columns k, omega, v_g.
    Dispersion {
        /// Infinite-range couplings (needs alpha > 1).
        #[arg(long)]
        thermodynamic: bool,
        #[arg(long, value_enum, default_value_t = GridKind::HalfInteger)]
        grid: GridKind,
        /// Number of k points for uniform and log grids.
        #[arg(long, default_value_t = 200)]
        points: usize,
        #[arg(long, default_value_t = 1e-3, allow_hyphen_values = true)]
        k_min: f64,
        #[arg(long, default_value_t = std::f64::consts::PI, allow_hyphen_values = true)]
        k_max: f64,
    },
    /// Magnetizations and spin correlators between the anchor and every later site.
    Correlators {
        /// Also write the A and B matrices as CSV.
        #[arg(long)]
        dump_quadratic: Option<PathBuf>,
        /// Also write the quasiparticle energies as CSV.
        #[arg(long)]
        dump_spectrum: Option<PathBuf>,
    },
    /// Entanglement profile E_r between the anchor and the site r further on.
    Profile,
    /// Monogamy score over a sweep of Z or h.
    Monogamy {
        #[arg(long, value_enum, default_value_t = SweepAxis::Z)]
        sweep: SweepAxis,
        /// Comma-separated sweep values; for Z defaults to 1..=N-1.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        values: Vec<f64>,
    },
    /// Run a JSON grid of parameter points.
    Scan {
        /// Grid description file.
        #[arg(long)]
        grid: PathBuf,
    },
    /// Compare the free-fermion path with exact diagonalization at random points.
    OracleCheck {
        #[arg(long, default_value_t = 50)]
        points: usize,
    },
}

impl GlobalArgs {
    fn params(&self) -> Result<ModelParams> {
        let z = self.z.unwrap_or(self.n.saturating_sub(1));
        Ok(ModelParams::new(self.n, z, self.alpha, self.h)?)
    }
}

struct Outcome {
    table: Table,
    /// Nonzero exit requested after the output is written.
    failure: Option<String>,
}

impl From<Table> for Outcome {
    fn from(table: Table) -> Self {
        Outcome { table, failure: None }
    }
}

fn dispersion_table(
    g: &GlobalArgs,
    thermodynamic: bool,
    grid: GridKind,
    points: usize,
    k_min: f64,
    k_max: f64,
) -> Result<Table> {
    let z = g.z.unwrap_or(g.n.saturating_sub(1));
    let params = if thermodynamic {
        // only alpha and h matter; N sizes the half-integer grid
        ModelParams { n: g.n, z, alpha: g.alpha, h: g.h }
    } else {
        g.params()?
    };
    let grid = match grid {
        GridKind::HalfInteger => KGrid::HalfInteger { n: g.n },
        GridKind::Uniform => KGrid::Uniform { lo: k_min, hi: k_max, points },
        GridKind::Log => KGrid::Log { lo: k_min, hi: k_max, points },
    };
    let curve = dispersion(&params, &grid, thermodynamic)?;
    let vg = group_velocity(&curve)?;
    let mut t = Table::new(["k", "omega", "v_g"]);
    for ((&k, &w), &v) in curve.k.iter().zip(&curve.omega).zip(&vg) {
        t.push(vec![k.into(), w.into(), v.into()]);
    }
    Ok(t)
}

fn write_side_file(path: &Path, write: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>) -> Result<()> {
    let sink = Sink::open(Some(path))?;
    let mut buf = Vec::new();
    write(&mut buf)?;
    sink.finish(&buf)
}

fn correlators_table(g: &GlobalArgs, dump_quadratic: Option<&Path>, dump_spectrum: Option<&Path>) -> Result<Table> {
    let params = g.params()?;
    if g.anchor < 1 || g.anchor >= params.n {
        bail!("anchor {} must lie in 1..{}", g.anchor, params.n);
    }
    let qf = QuadraticForm::from_params(&params);
    let sol = diagonalize(&qf).with_context(|| format!("params = {params:?}"))?;
    if let Some(path) = dump_quadratic {
        write_side_file(path, |buf| qf.write_csv(buf))?;
    }
    if let Some(path) = dump_spectrum {
        let mut t = Table::new(["mode", "xi"]);
        for (k, &xi) in sol.xi.iter().enumerate() {
            t.push(vec![k.into(), xi.into()]);
        }
        let bytes = t.render(Format::Csv)?;
        write_side_file(path, |buf| {
            buf.extend_from_slice(&bytes);
            Ok(())
        })?;
    }
    let mut data = correlation_matrix(&sol);
    data.params = Some(params);
    let i = g.anchor;
    let rows: Vec<Vec<Cell>> = (i + 1..=params.n)
        .into_par_iter()
        .map(|j| {
            let c = data.correlators(i, j);
            vec![
                i.into(),
                j.into(),
                (j - i).into(),
                c.mz_i.into(),
                c.mz_j.into(),
                c.cxx.into(),
                c.cyy.into(),
                c.czz.into(),
                data.string_correlator_xx(i, j).into(),
                data.string_correlator_yy(i, j).into(),
            ]
        })
        .collect();
    let mut t = Table::new(["i", "j", "r", "mz_i", "mz_j", "cxx", "cyy", "czz", "string_xx", "string_yy"]);
    t.rows = rows;
    Ok(t)
}

fn profile_table(g: &GlobalArgs) -> Result<Table> {
    let params = g.params()?;
    let data = CorrelationData::from_params(&params).with_context(|| format!("params = {params:?}"))?;
    let profile = profile_from_data(&data, &params, g.measure.into(), g.anchor)?;
    let mut t = Table::new(["r", "E_r"]);
    for &(r, e) in &profile.entries {
        t.push(vec![r.into(), e.into()]);
    }
    Ok(t)
}

fn monogamy_table(g: &GlobalArgs, sweep: SweepAxis, values: &[f64]) -> Result<Table> {
    let base = g.params()?;
    let points: Vec<(Cell, ModelParams)> = match sweep {
        SweepAxis::Z => {
            let zs: Vec<usize> = if values.is_empty() {
                (1..base.n).collect()
            } else {
                values
                    .iter()
                    .map(|&v| {
                        if v >= 1.0 && v.fract() == 0.0 {
                            Ok(v as usize)
                        } else {
                            Err(anyhow::anyhow!("Z sweep value {v} is not a positive integer"))
                        }
                    })
                    .collect::<Result<_>>()?
            };
            zs.into_iter().map(|z| Ok((Cell::from(z), base.with_z(z)?))).collect::<Result<_>>()?
        }
        SweepAxis::H => {
            if values.is_empty() {
                bail!("an h sweep needs --values");
            }
            values.iter().map(|&h| Ok((Cell::from(h), base.with_h(h)?))).collect::<Result<_>>()?
        }
    };
    let results = points.par_iter().map(|(_, p)| monogamy_score(p)).collect::<lrising::Result<Vec<_>>>()?;
    let axis = match sweep {
        SweepAxis::Z => "z",
        SweepAxis::H => "h",
    };
    let mut t = Table::new([axis, "one_tangle", "pairwise_sum", "delta"]);
    for ((key, _), m) in points.into_iter().zip(results) {
        t.push(vec![key, m.one_tangle.into(), m.pairwise_sum.into(), m.delta.into()]);
    }
    Ok(t)
}

fn scan_table(path: &Path) -> Result<Table> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read grid {}", path.display()))?;
    let spec: GridSpec =
        serde_json::from_str(&text).with_context(|| format!("invalid grid file {}", path.display()))?;
    let result = scan(&spec);
    let failed = result.failed_rows();
    if failed > 0 {
        eprintln!("{failed} of {} grid points flagged", result.rows.len());
    }
    let mut t = Table::new(result.columns.clone());
    for row in &result.rows {
        let mut cells =
            vec![row.n.into(), row.z.into(), row.alpha.into(), row.h.into(), Cell::Text(row.status.clone())];
        cells.extend(row.values.iter().map(|&v| Cell::from(v)));
        t.push(cells);
    }
    Ok(t)
}

fn oracle_outcome(g: &GlobalArgs, points: usize) -> Result<Outcome> {
    let tolerance = g.tolerance.unwrap_or(ORACLE_TOLERANCE);
    let report = equivalence_suite(g.seed, points)?;
    let mut t = Table::new(["quantity", "max_deviation"]);
    for (name, v) in report.max.named() {
        t.push(vec![Cell::Text(name.into()), v.into()]);
    }
    let worst = report.max.max();
    t.push(vec![Cell::Text("max".into()), worst.into()]);
    let failure = (worst > tolerance)
        .then(|| format!("max deviation {worst:e} exceeds tolerance {tolerance:e} (seed {})", g.seed));
    Ok(Outcome { table: t, failure })
}

fn run(cli: Cli) -> Result<()> {
    let start = Instant::now();
    let g = &cli.global;
    if let Some(threads) = g.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("cannot configure the worker pool")?;
    }
    let sink = Sink::open(g.out.as_deref())?;
    let outcome: Outcome = match &cli.command {
        Command::Dispersion { thermodynamic, grid, points, k_min, k_max } => {
            dispersion_table(g, *thermodynamic, *grid, *points, *k_min, *k_max)?.into()
        }
        Command::Correlators { dump_quadratic, dump_spectrum } => {
            correlators_table(g, dump_quadratic.as_deref(), dump_spectrum.as_deref())?.into()
        }
        Command::Profile => profile_table(g)?.into(),
        Command::Monogamy { sweep, values } => monogamy_table(g, *sweep, values)?.into(),
        Command::Scan { grid } => scan_table(grid)?.into(),
        Command::OracleCheck { points } => oracle_outcome(g, *points)?,
    };
    let rows = outcome.table.rows.len();
    let dest = sink.describe();
    sink.finish(&outcome.table.render(g.format)?)?;
    eprintln!("wrote {rows} rows to {dest} in {:.3}s", start.elapsed().as_secs_f64());
    if let Some(msg) = outcome.failure {
        bail!(msg);
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
