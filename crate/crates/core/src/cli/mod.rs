//! Command-line front end: distance tables, crossing reports and the
//! verification suites.

mod output;
pub mod verify;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::linalg::{DensityMatrix, FockTruncation};
use crate::metrics::trace_distance;
use crate::mpemba::{CrossingRecord, CrossingReport, DistanceSeries, DEFAULT_CROSSING_TOLERANCE};
use crate::oscillator::{hs_distance_closed, trace_distance_closed, InitialOscState};
use crate::schedules::{uniform_grid, Schedule, TabulatedProfile, DEFAULT_GRID_POINTS};
use crate::tls::{
    jcm_thermal_components, jcm_zero_temperature_state, tls_energy, tls_pair_evolve, BathThermal, BlochVector,
};

pub use output::{format_value, sidecar_path, write_csv};

/// Exit status for a failed verification run.
pub const EXIT_VERIFY_FAILED: i32 = 1;
/// Exit status for bad arguments or inputs.
pub const EXIT_USAGE: i32 = 2;

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "MPEMBA_QSIM_THREADS";

#[derive(Debug, Parser)]
#[command(name = "mpemba-qsim", version, about = "Quantum Mpemba crossings in exactly solvable open systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Distance of a damped oscillator from its vacuum for several initial states.
    Oscillator(OscillatorArgs),
    /// Distance of a qubit from equilibrium, exchanging with a bath qubit or a bosonic mode.
    Tls(TlsArgs),
    /// Compare every closed form against brute-force evolution.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OscSchedule {
    Exp,
    Sinexp,
    Tabulated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TlsSchedule {
    Exp,
    Sinexp,
    Ramp,
    Cavity,
    Tabulated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Metric {
    Trace,
    Hs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Model {
    Pair,
    Jcm,
}

#[derive(Debug, clap::Args)]
pub struct OscillatorArgs {
    #[arg(long, value_enum, default_value = "exp")]
    pub schedule: OscSchedule,
    /// Decay rate γ.
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    /// CSV with `t,cos2` rows, for `--schedule tabulated`.
    #[arg(long)]
    pub profile: Option<PathBuf>,
    /// End of the window in τ = γt.
    #[arg(long)]
    pub tmax: Option<f64>,
    /// Number of grid points.
    #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
    pub steps: usize,
    /// thermal:n̄, coherent:α (α may be complex, e.g. 1+0.5i) or number:N.
    #[arg(long, num_args = 1.., required = true)]
    pub states: Vec<String>,
    #[arg(long, value_enum, default_value = "trace")]
    pub metric: Metric,
    /// CSV destination; the JSON report goes next to it. Defaults to stdout/stderr.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct TlsArgs {
    #[arg(long, value_enum, default_value = "pair")]
    pub model: Model,
    #[arg(long, value_enum, default_value = "exp")]
    pub schedule: TlsSchedule,
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    /// Switch-off time of the ramp and cavity couplings.
    #[arg(long, default_value_t = 1.0)]
    pub t0: f64,
    #[arg(long)]
    pub profile: Option<PathBuf>,
    /// Initial Bloch vector rx,ry,rz; repeat for several states.
    #[arg(long = "bloch", required = true, allow_hyphen_values = true)]
    pub bloch: Vec<String>,
    /// Bath βħω, or `inf` for zero temperature.
    #[arg(long, default_value = "inf")]
    pub beta: String,
    /// Qubit frequency in units of the inverse schedule time scale.
    #[arg(long, default_value_t = 10.0)]
    pub omega: f64,
    #[arg(long)]
    pub tmax: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
    pub steps: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Directory for per-state Bloch trajectories (`--model jcm` only).
    #[arg(long)]
    pub trajectories: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct VerifyArgs {
    /// Fock levels per bosonic mode.
    #[arg(long, default_value_t = crate::linalg::DEFAULT_FOCK_DIM)]
    pub dim: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Comma-separated suite=tolerance pairs.
    #[arg(long, default_value = "")]
    pub tol_overrides: String,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit status.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    configure_threads();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

fn configure_threads() {
    let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()) else {
        return;
    };
    if n > 0 {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

pub fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Oscillator(args) => cmd_oscillator(&args).map(|_| 0),
        Command::Tls(args) => cmd_tls(&args).map(|_| 0),
        Command::Verify(args) => cmd_verify(&args),
    }
}

fn load_profile(path: Option<&Path>) -> Result<Schedule> {
    let path = path.ok_or_else(|| Error::Usage("--schedule tabulated needs --profile PATH".into()))?;
    Ok(Schedule::Tabulated(TabulatedProfile::from_csv_path(path)?))
}

fn tau_grid(schedule: &Schedule, tmax: Option<f64>, steps: usize) -> Result<Vec<f64>> {
    let end = tmax.unwrap_or_else(|| schedule.default_tau_max());
    if !(end > 0.0) || !end.is_finite() {
        return Err(Error::Usage(format!("--tmax must be positive, got {end}")));
    }
    if steps < 2 {
        return Err(Error::Usage(format!("--steps must be at least 2, got {steps}")));
    }
    uniform_grid(0.0, end, steps)
}

fn schedule_json(schedule: &Schedule) -> Value {
    let mut map = Map::new();
    map.insert("kind".into(), json!(schedule.kind()));
    for (name, value) in schedule.parameters() {
        map.insert(name.into(), json!(value));
    }
    Value::Object(map)
}

fn grid_json(grid: &[f64]) -> Value {
    json!({ "variable": "tau", "start": grid[0], "end": grid[grid.len() - 1], "points": grid.len() })
}

#[derive(Debug, Serialize)]
struct SeriesSummary {
    label: String,
    initial_energy: f64,
    initial_distance: f64,
    local_increases: usize,
}

#[derive(Debug, Serialize)]
struct FigureReport {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    #[serde(flatten)]
    settings: Map<String, Value>,
    schedule: Value,
    grid: Value,
    series: Vec<SeriesSummary>,
    crossings: Vec<CrossingRecord>,
}

fn table(grid: &[f64], columns: &[&[f64]]) -> Vec<Vec<f64>> {
    (0..grid.len())
        .map(|i| std::iter::once(grid[i]).chain(columns.iter().map(|c| c[i])).collect())
        .collect()
}

pub fn cmd_oscillator(args: &OscillatorArgs) -> Result<()> {
    let schedule = match args.schedule {
        OscSchedule::Exp => Schedule::exp_decay(args.gamma),
        OscSchedule::Sinexp => Schedule::sin_exp_decay(args.gamma),
        OscSchedule::Tabulated => load_profile(args.profile.as_deref()),
    }
    .map_err(|e| Error::Usage(e.to_string()))?;
    let states = args
        .states
        .iter()
        .map(|s| s.parse::<InitialOscState>())
        .collect::<Result<Vec<_>>>()?;
    let grid = tau_grid(&schedule, args.tmax, args.steps)?;
    let cos2 = grid
        .iter()
        .map(|&tau| schedule.eval_tau(tau).map(|s| s.cos2))
        .collect::<Result<Vec<_>>>()?;

    let distance = |state: &InitialOscState, c: f64| match args.metric {
        Metric::Trace => trace_distance_closed(state, c),
        Metric::Hs => hs_distance_closed(state, c),
    };
    let series = states
        .iter()
        .map(|state| {
            let values = cos2.iter().map(|&c| distance(state, c)).collect();
            DistanceSeries::new(state.label(), grid.clone(), values)
        })
        .collect::<Result<Vec<_>>>()?;
    let crossings = CrossingReport::all_pairs(&series, DEFAULT_CROSSING_TOLERANCE)?;

    let summaries = states
        .iter()
        .zip(&series)
        .map(|(state, s)| SeriesSummary {
            label: s.label.clone(),
            initial_energy: state.mean_occupation(),
            initial_distance: s.values[0],
            local_increases: s.local_increases(DEFAULT_CROSSING_TOLERANCE).len(),
        })
        .collect();
    let mut settings = Map::new();
    settings.insert("metric".into(), json!(if args.metric == Metric::Trace { "trace" } else { "hs" }));
    let report = FigureReport {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command: "oscillator",
        settings,
        schedule: schedule_json(&schedule),
        grid: grid_json(&grid),
        series: summaries,
        crossings: crossings.records(),
    };

    let header: Vec<String> = std::iter::once("tau".to_string()).chain(series.iter().map(|s| s.label.clone())).collect();
    let columns: Vec<&[f64]> = series.iter().map(|s| s.values.as_slice()).collect();
    output::emit(args.out.as_deref(), &header, table(&grid, &columns), &report)
}

struct QubitTrajectory {
    distance: Vec<f64>,
    energy: Vec<f64>,
    bloch: Vec<BlochVector>,
}

fn qubit_state(model: Model, r: &BlochVector, bath: &BathThermal, cos2: f64, phase: f64, omega_t: f64) -> Result<DensityMatrix> {
    match model {
        Model::Pair => tls_pair_evolve(r, bath, cos2, omega_t),
        Model::Jcm if bath.is_zero_temperature() => jcm_zero_temperature_state(r, phase, omega_t),
        Model::Jcm => jcm_thermal_components(r, bath, phase, omega_t, bath.series_cutoff()),
    }
}

pub fn cmd_tls(args: &TlsArgs) -> Result<()> {
    let schedule = match args.schedule {
        TlsSchedule::Exp => Schedule::exp_decay(args.gamma),
        TlsSchedule::Sinexp => Schedule::sin_exp_decay(args.gamma),
        TlsSchedule::Ramp => Schedule::ramp(args.t0),
        TlsSchedule::Cavity => Schedule::cavity_mode(args.t0),
        TlsSchedule::Tabulated => load_profile(args.profile.as_deref()),
    }
    .map_err(|e| Error::Usage(e.to_string()))?;
    if !args.omega.is_finite() {
        return Err(Error::Usage(format!("--omega must be finite, got {}", args.omega)));
    }
    if args.trajectories.is_some() && args.model != Model::Jcm {
        return Err(Error::Usage("--trajectories is only available with --model jcm".into()));
    }
    let bath: BathThermal = args.beta.parse()?;
    let vectors = args
        .bloch
        .iter()
        .map(|s| s.parse::<BlochVector>())
        .collect::<Result<Vec<_>>>()?;
    let grid = tau_grid(&schedule, args.tmax, args.steps)?;
    let samples = grid
        .iter()
        .map(|&tau| schedule.eval_tau(tau))
        .collect::<Result<Vec<_>>>()?;
    let equilibrium = DensityMatrix::from_populations(&[bath.p_excited(), bath.p_ground()])?;

    let trajectories = vectors
        .iter()
        .map(|r| {
            let mut traj = QubitTrajectory {
                distance: Vec::with_capacity(grid.len()),
                energy: Vec::with_capacity(grid.len()),
                bloch: Vec::with_capacity(grid.len()),
            };
            for (tau, sample) in grid.iter().zip(&samples) {
                let omega_t = args.omega * tau;
                let rho = qubit_state(args.model, r, &bath, sample.cos2, sample.phase, omega_t)?;
                traj.distance.push(trace_distance(&rho, &equilibrium)?);
                traj.energy.push(tls_energy(&rho)?);
                traj.bloch.push(BlochVector::from_density(&rho)?);
            }
            Ok(traj)
        })
        .collect::<Result<Vec<_>>>()?;

    let labels: Vec<String> = vectors.iter().map(BlochVector::label).collect();
    let series = labels
        .iter()
        .zip(&trajectories)
        .map(|(label, t)| DistanceSeries::new(label.clone(), grid.clone(), t.distance.clone()))
        .collect::<Result<Vec<_>>>()?;
    let crossings = CrossingReport::all_pairs(&series, DEFAULT_CROSSING_TOLERANCE)?;

    let mut header: Vec<String> = std::iter::once("tau".to_string()).chain(labels.iter().cloned()).collect();
    let mut columns: Vec<&[f64]> = trajectories.iter().map(|t| t.distance.as_slice()).collect();
    if args.model == Model::Jcm {
        header.extend(labels.iter().map(|l| format!("energy:{l}")));
        columns.extend(trajectories.iter().map(|t| t.energy.as_slice()));
    }

    let mut trajectory_files = Vec::new();
    if let Some(dir) = &args.trajectories {
        std::fs::create_dir_all(dir)?;
        for (i, traj) in trajectories.iter().enumerate() {
            let path = dir.join(format!("bloch_{}.csv", i + 1));
            let rows = grid
                .iter()
                .zip(&traj.bloch)
                .map(|(&tau, a)| vec![tau, a.rx, a.ry, a.rz]);
            let head = ["tau", "ax", "ay", "az"].map(String::from);
            write_csv(std::io::BufWriter::new(std::fs::File::create(&path)?), &head, rows)?;
            trajectory_files.push(json!({ "label": labels[i], "path": path.display().to_string() }));
        }
    }

    let summaries = labels
        .iter()
        .zip(&trajectories)
        .map(|(label, t)| SeriesSummary {
            label: label.clone(),
            initial_energy: t.energy[0],
            initial_distance: t.distance[0],
            local_increases: series
                .iter()
                .find(|s| &s.label == label)
                .map_or(0, |s| s.local_increases(DEFAULT_CROSSING_TOLERANCE).len()),
        })
        .collect();
    let mut settings = Map::new();
    settings.insert("model".into(), json!(if args.model == Model::Pair { "pair" } else { "jcm" }));
    settings.insert(
        "beta".into(),
        if bath.is_zero_temperature() { json!("inf") } else { json!(bath.beta_hbar_omega()) },
    );
    settings.insert("omega".into(), json!(args.omega));
    if !trajectory_files.is_empty() {
        settings.insert("trajectories".into(), Value::Array(trajectory_files));
    }
    let report = FigureReport {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command: "tls",
        settings,
        schedule: schedule_json(&schedule),
        grid: grid_json(&grid),
        series: summaries,
        crossings: crossings.records(),
    };
    output::emit(args.out.as_deref(), &header, table(&grid, &columns), &report)
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<i32> {
    let trunc = FockTruncation::new(args.dim).map_err(|e| Error::Usage(e.to_string()))?;
    let overrides = verify::parse_overrides(&args.tol_overrides)?;
    let report = verify::run_suites(trunc, args.seed, &overrides)?;
    let text = output::to_json_string(&report)?;
    match &args.out {
        Some(path) => std::fs::write(path, &text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    let mut stderr = std::io::stderr().lock();
    for suite in report.failures() {
        match suite.errors.first() {
            Some(first) => writeln!(
                stderr,
                "FAIL {}: {} of {} cases could not be evaluated; first: {first}",
                suite.name,
                suite.errors.len(),
                suite.cases
            )?,
            None => writeln!(
                stderr,
                "FAIL {}: max deviation {:e} exceeds tolerance {:e}; worst case {}",
                suite.name, suite.max_deviation, suite.tolerance, suite.worst_case
            )?,
        }
    }
    Ok(if report.pass { 0 } else { EXIT_VERIFY_FAILED })
}
