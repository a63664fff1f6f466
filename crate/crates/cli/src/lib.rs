//! Command-line front end: config loading, scans, sampling and fits.
//!
//! Every output is written atomically and carries the tool version, the
//! arguments and the resolved configuration, so identical invocations give
//! byte-identical files.

pub mod config;
pub mod error;
pub mod format;
pub mod table;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use pairspin::detection::{derive_seed, sample_counts};
use pairspin::inference::{
    fit_fidelity, fit_fringe, fit_sinusoid, grid_from_range, model_curves, CountData, RamseyProbe,
    ScanSpec, ScanVariable,
};
use serde::Serialize;

pub use config::RunConfig;
pub use error::CliError;
use table::{Rows, Table};

#[derive(Debug, Parser)]
#[command(name = "pairspin", version, about = "Simulate and fit collisional pair-entanglement experiments")]
pub struct Cli {
    /// Run configuration (JSON). Built-in defaults are used when omitted.
    #[arg(long, global = true, env = "PAIRSPIN_CONFIG")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Outcome curves versus Raman pulse duration.
    PulseScan(PulseScanArgs),
    /// Outcome curves versus Raman detuning for a π/2 – wait – π/2 sequence.
    RamseyScan(RamseyScanArgs),
    /// Draw seeded synthetic counts from a model CSV.
    Sample(SampleArgs),
    /// χ² scan of the coherence fraction against count data.
    FitFidelity(FitFidelityArgs),
    /// Sinusoid-with-offset fit to one outcome channel.
    FitFringe(FitFringeArgs),
    /// Parse and check a config, printing the resolved document.
    ValidateConfig,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(group(ArgGroup::new("extent").required(true).args(["tau_max_us", "area_max"])))]
pub struct PulseScanArgs {
    /// Longest pulse, µs.
    #[arg(long)]
    pub tau_max_us: Option<f64>,
    /// Largest pulse area Ω·τ, rad.
    #[arg(long)]
    pub area_max: Option<f64>,
    #[arg(long, default_value_t = 25, value_parser = clap::value_parser!(u32).range(2..))]
    pub points: u32,
    /// Coherence fraction of the χ₁ population; defaults to the config value.
    #[arg(long)]
    pub fidelity: Option<f64>,
    /// Parity-dephasing strength λ; defaults to the config value.
    #[arg(long)]
    pub destroy: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProbeArg {
    Pair,
    SingleAtom,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(group(ArgGroup::new("pulse_length").args(["pulse_us", "pulse_area"])))]
pub struct RamseyScanArgs {
    #[arg(long, default_value_t = -300.0, allow_hyphen_values = true)]
    pub delta_min_khz: f64,
    #[arg(long, default_value_t = 300.0, allow_hyphen_values = true)]
    pub delta_max_khz: f64,
    #[arg(long, default_value_t = 241, value_parser = clap::value_parser!(u32).range(2..))]
    pub points: u32,
    /// Free-evolution time, µs; defaults to the config value.
    #[arg(long)]
    pub wait_us: Option<f64>,
    /// Duration of each Ramsey pulse, µs.
    #[arg(long)]
    pub pulse_us: Option<f64>,
    /// Resonant area of each Ramsey pulse, rad; defaults to the config value.
    #[arg(long)]
    pub pulse_area: Option<f64>,
    #[arg(long, value_enum, default_value_t = ProbeArg::Pair)]
    pub probe: ProbeArg,
    #[arg(long)]
    pub fidelity: Option<f64>,
    #[arg(long)]
    pub destroy: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SampleArgs {
    /// Model curves (`x,P0,P1,P2`).
    #[arg(long)]
    pub model: PathBuf,
    /// Shots per grid point.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub shots: u64,
    /// Base seed; row i uses a seed derived from it and i.
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum AxisArg {
    #[value(name = "tau_us")]
    #[serde(rename = "tau_us")]
    TauUs,
    #[value(name = "delta_khz")]
    #[serde(rename = "delta_khz")]
    DeltaKhz,
}

impl From<AxisArg> for ScanVariable {
    fn from(a: AxisArg) -> Self {
        match a {
            AxisArg::TauUs => ScanVariable::PulseDuration,
            AxisArg::DeltaKhz => ScanVariable::RamanDetuning,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FitFidelityArgs {
    /// Count data (`x,shots,n0,n1,n2`).
    #[arg(long)]
    pub data: PathBuf,
    /// Coherence-fraction grid `start:step:end`; must cover [0, 1].
    #[arg(long, default_value = "0:0.01:1")]
    pub grid: String,
    /// Abscissa of a file that does not declare one.
    #[arg(long, value_enum)]
    pub axis: Option<AxisArg>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FitFringeArgs {
    /// Count data or model curves.
    #[arg(long)]
    pub data: PathBuf,
    /// Outcome channel: number of atoms remaining.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(0..=2))]
    pub channel: u8,
    /// Starting fringe frequency, cycles per x unit.
    #[arg(long)]
    pub guess: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Runs one parsed invocation. Validation output goes to `stdout`.
pub fn run(cli: &Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    let cfg = RunConfig::load(cli.config.as_deref())?;
    match &cli.command {
        Command::PulseScan(a) => pulse_scan(&cfg, a),
        Command::RamseyScan(a) => ramsey_scan(&cfg, a),
        Command::Sample(a) => sample(&cfg, a),
        Command::FitFidelity(a) => fidelity(&cfg, a),
        Command::FitFringe(a) => fringe(&cfg, a),
        Command::ValidateConfig => stdout
            .write_all(format::json_pretty(&cfg).as_bytes())
            .map_err(|e| CliError::io(e.to_string())),
    }
}

/// Protocol parameters from the config, on `grid`.
pub fn scan_spec(cfg: &RunConfig, variable: ScanVariable, grid: Vec<f64>) -> ScanSpec {
    ScanSpec {
        variable,
        grid,
        rabi_rate: cfg.pulse.rabi_rate_rad_s,
        pulse_detuning: cfg.pulse.detuning_rad_s,
        wait_us: cfg.pulse.ramsey_wait_us,
        pulse_area: cfg.pulse.ramsey_pulse_area_rad,
        destruction: cfg.destruction_lambda,
        hold_time_s: cfg.hold_time_s,
        mode: cfg.pulse.mode,
        probe: RamseyProbe::Pair,
    }
}

fn linspace(lo: f64, hi: f64, n: u32) -> Vec<f64> {
    let last = (n - 1) as f64;
    (0..n).map(|i| lo + (hi - lo) * i as f64 / last).collect()
}

fn probability_arg(name: &str, v: Option<f64>) -> Result<Option<f64>, CliError> {
    match v {
        Some(p) if !(0.0..=1.0).contains(&p) => {
            Err(CliError::data(format!("--{name} {p} is outside [0, 1]")).with_key(name))
        }
        _ => Ok(v),
    }
}

fn positive_arg(name: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(CliError::data(format!("--{name} {v} must be positive")).with_key(name))
    }
}

fn write_curves(
    command: &str,
    cfg: &RunConfig,
    args: &impl Serialize,
    spec: &ScanSpec,
    fidelity: f64,
    out: &Option<PathBuf>,
    default_name: &str,
) -> Result<(), CliError> {
    let curves = model_curves(spec, &cfg.rates, &cfg.detection, fidelity)?;
    let comments = table::header_comments(
        command,
        spec.variable,
        &format::json_compact(args),
        &cfg.to_json(),
    );
    let path = output_path(cfg, out, default_name)?;
    write_atomic(&path, &table::model_csv(&comments, &spec.grid, &curves))
}

fn pulse_scan(cfg: &RunConfig, a: &PulseScanArgs) -> Result<(), CliError> {
    let fidelity = probability_arg("fidelity", a.fidelity)?.unwrap_or(cfg.rates.coherence_fraction);
    let omega = cfg.pulse.rabi_rate_rad_s;
    let tau_max_us = match (a.tau_max_us, a.area_max) {
        (Some(t), _) => positive_arg("tau-max-us", t)?,
        (None, Some(area)) => positive_arg("area-max", area)? / omega * 1e6,
        (None, None) => unreachable!("clap enforces the extent group"),
    };
    let mut spec = scan_spec(cfg, ScanVariable::PulseDuration, linspace(0.0, tau_max_us, a.points));
    if let Some(l) = probability_arg("destroy", a.destroy)? {
        spec.destruction = l;
    }
    write_curves("pulse-scan", cfg, a, &spec, fidelity, &a.out, "pulse_scan.csv")
}

fn ramsey_scan(cfg: &RunConfig, a: &RamseyScanArgs) -> Result<(), CliError> {
    let fidelity = probability_arg("fidelity", a.fidelity)?.unwrap_or(cfg.rates.coherence_fraction);
    if !(a.delta_min_khz.is_finite() && a.delta_max_khz.is_finite() && a.delta_max_khz > a.delta_min_khz) {
        return Err(CliError::data("--delta-max-khz must exceed --delta-min-khz").with_key("delta-max-khz"));
    }
    let mut spec = scan_spec(
        cfg,
        ScanVariable::RamanDetuning,
        linspace(a.delta_min_khz, a.delta_max_khz, a.points),
    );
    if let Some(w) = a.wait_us {
        if !(w.is_finite() && w >= 0.0) {
            return Err(CliError::data(format!("--wait-us {w} must be nonnegative")).with_key("wait-us"));
        }
        spec.wait_us = w;
    }
    if let Some(t) = a.pulse_us {
        spec.pulse_area = spec.rabi_rate * positive_arg("pulse-us", t)? * 1e-6;
    }
    if let Some(area) = a.pulse_area {
        spec.pulse_area = positive_arg("pulse-area", area)?;
    }
    if let Some(l) = probability_arg("destroy", a.destroy)? {
        spec.destruction = l;
    }
    spec.probe = match a.probe {
        ProbeArg::Pair => RamseyProbe::Pair,
        ProbeArg::SingleAtom => RamseyProbe::SingleAtom,
    };
    write_curves("ramsey-scan", cfg, a, &spec, fidelity, &a.out, "ramsey_scan.csv")
}

fn sample(cfg: &RunConfig, a: &SampleArgs) -> Result<(), CliError> {
    let input = table::read_table(&a.model)?;
    let axis = input.axis_or(None)?;
    let Rows::Model { x, curves } = &input.rows else {
        return Err(CliError::data("sample needs model curves (x,P0,P1,P2), not counts").with_key("model"));
    };
    let counts = curves
        .iter()
        .enumerate()
        .map(|(i, d)| {
            let s = d.sum();
            let d = pairspin::detection::OutcomeDistribution { p0: d.p0 / s, p1: d.p1 / s, p2: d.p2 / s };
            sample_counts(&d, a.shots, derive_seed(a.seed, i as u64))
        })
        .collect::<pairspin::Result<Vec<_>>>()?;
    let data = CountData::new(x.clone(), counts)?;
    let comments = table::header_comments("sample", axis, &format::json_compact(a), &cfg.to_json());
    let path = output_path(cfg, &a.out, "samples.csv")?;
    write_atomic(&path, &table::counts_csv(&comments, &data))
}

#[derive(Serialize)]
struct Report<'a, A: Serialize, R: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    args: &'a A,
    axis: &'static str,
    config: &'a RunConfig,
    result: R,
}

fn report<A: Serialize, R: Serialize>(
    command: &'static str,
    args: &A,
    axis: ScanVariable,
    cfg: &RunConfig,
    result: R,
) -> String {
    format::json_pretty(&Report {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command,
        args,
        axis: axis.axis_label(),
        config: cfg,
        result,
    })
}

/// `start:step:end`.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::data(format!("--grid `{spec}` is not start:step:end")).with_key("grid");
    let parts: Vec<f64> = spec
        .split(':')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| bad())?;
    let [start, step, end] = parts[..] else {
        return Err(bad());
    };
    grid_from_range(start, step, end).map_err(|e| CliError::data(e.to_string()).with_key("grid"))
}

fn fidelity(cfg: &RunConfig, a: &FitFidelityArgs) -> Result<(), CliError> {
    let f_grid = parse_grid(&a.grid)?;
    let input = table::read_table(&a.data)?;
    let axis = input.axis_or(a.axis.map(Into::into))?;
    let Rows::Counts(data) = &input.rows else {
        return Err(CliError::data("fit-fidelity needs counts (x,shots,n0,n1,n2)").with_key("data"));
    };
    let spec = scan_spec(cfg, axis, data.x.clone());
    let est = fit_fidelity(data, &spec, &cfg.rates, &cfg.detection, &f_grid)
        .map_err(|e| CliError::from(e).with_key("grid"))?;
    let path = output_path(cfg, &a.out, "fit_fidelity.json")?;
    write_atomic(&path, &report("fit-fidelity", a, axis, cfg, est))
}

fn fringe(cfg: &RunConfig, a: &FitFringeArgs) -> Result<(), CliError> {
    let input: Table = table::read_table(&a.data)?;
    let axis = input.axis_or(None).unwrap_or(ScanVariable::RamanDetuning);
    let channel = a.channel as usize;
    let fit = match &input.rows {
        Rows::Counts(data) => fit_fringe(data, channel, a.guess)?,
        Rows::Model { x, curves } => {
            let y: Vec<f64> = curves.iter().map(|d| d.channel(channel)).collect();
            fit_sinusoid(x, &y, a.guess)?
        }
    };
    let path = output_path(cfg, &a.out, "fit_fringe.json")?;
    write_atomic(&path, &report("fit-fringe", a, axis, cfg, fit))
}

fn output_path(cfg: &RunConfig, out: &Option<PathBuf>, default_name: &str) -> Result<PathBuf, CliError> {
    match (out, &cfg.output_dir) {
        (Some(p), _) => Ok(p.clone()),
        (None, Some(dir)) => Ok(dir.join(default_name)),
        (None, None) => Err(CliError::config("no --out given and no output_dir configured").with_key("output_dir")),
    }
}

/// Writes `contents` to a temporary file beside `path`, then renames it.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let fail = |e: std::io::Error| CliError::io(format!("cannot write {}: {e}", path.display())).with_key("out");
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(fail)?;
    tmp.write_all(contents.as_bytes()).map_err(fail)?;
    tmp.as_file().sync_all().map_err(fail)?;
    tmp.persist(path).map_err(|e| fail(e.error))?;
    Ok(())
}
