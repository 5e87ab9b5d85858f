//! `dimer` command-line driver: curves, time maxima, parameter sweeps,
//! ground-state analysis and the dense-oracle cross-check, each writing CSV
//! or JSON plus a run manifest.

pub mod output;

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dimer_core::analysis::{assistance_gain, max_over_time, sweep, Axis, SweepOptions, TimeWindow};
use dimer_core::config::ConfigFile;
use dimer_core::dynamics::{
    assistance_condition, delta0_for_branch, p12_correlated_zero_temp, p12_thermal, p12_zero_temp, q_threshold,
    resonance_gamma, FreeCoupling, GroundStateBranch,
};
use dimer_core::oracle::{OracleEvolver, MAX_ORACLE_SPINS};
use dimer_core::{DimerError, SystemConfig, ThermalSpec};
use serde_json::json;
use thiserror::Error;

use output::{write_argmax, write_curve, write_grid, write_text, RunManifest};

/// Largest |ΔP| tolerated between the analytic result and the oracle.
pub const ORACLE_TOLERANCE: f64 = 1e-8;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_ORACLE: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] DimerError),
    #[error("cannot write {0}")]
    Output(String),
    #[error("{0}")]
    Usage(String),
    #[error("oracle disagreement: max |dP| = {max_diff:e} exceeds {tolerance:e}")]
    OracleMismatch { max_diff: f64, tolerance: f64 },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::OracleMismatch { .. } => EXIT_ORACLE,
            _ => EXIT_USAGE,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "dimer", version, about = "Energy transfer in a dimer dephased by two spin-star baths")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct ConfigArg {
    /// JSON configuration file
    #[arg(long)]
    pub config: PathBuf,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    #[command(flatten)]
    pub config: ConfigArg,
    #[arg(long, default_value_t = 0.0)]
    pub t_min: f64,
    #[arg(long, default_value_t = 2.0)]
    pub t_max: f64,
    /// Number of samples, endpoints included
    #[arg(long, default_value_t = 2001)]
    pub steps: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct WindowArgs {
    #[arg(long, default_value_t = 0.0)]
    pub t_min: f64,
    #[arg(long, default_value_t = 2.0)]
    pub t_max: f64,
    #[arg(long, default_value_t = 2000)]
    pub coarse_steps: usize,
    #[arg(long, default_value_t = 60)]
    pub refine_iterations: usize,
}

impl WindowArgs {
    fn window(&self) -> TimeWindow {
        TimeWindow {
            t_min: self.t_min,
            t_max: self.t_max,
            coarse_steps: self.coarse_steps,
            refine_iterations: self.refine_iterations,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Metric {
    MaxP,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Free {
    Gamma1,
    Gamma2,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// P(t) with both baths fully polarized down
    ZeroTemp(CurveArgs),
    /// Thermally averaged P(t)
    Thermal(CurveArgs),
    /// P(t) with correlated baths in their ground state
    CorrelatedZeroTemp(CurveArgs),
    /// Time maxima over a 1D or 2D parameter grid
    Sweep {
        #[command(flatten)]
        config: ConfigArg,
        /// name=min:max:count, given once or twice
        #[arg(long = "axis", required = true, num_args = 1)]
        axes: Vec<String>,
        #[arg(long, value_enum, default_value = "max-p")]
        metric: Metric,
        #[command(flatten)]
        window: WindowArgs,
        /// Worker threads (default: machine parallelism)
        #[arg(long, env = "DIMER_THREADS")]
        threads: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// max over t of P(t) and the gain over the decoupled dimer
    Max {
        #[command(flatten)]
        config: ConfigArg,
        #[command(flatten)]
        window: WindowArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Coupling that makes the zero-temperature detuning vanish
    Resonance {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long, value_enum)]
        free: Free,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Correlated bath ground state, q threshold and compensation check
    GroundState {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the analytic P(t) with dense diagonalization
    OracleCheck {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long)]
        n1: Option<u32>,
        #[arg(long)]
        n2: Option<u32>,
        #[arg(long, default_value_t = 50)]
        points: usize,
        #[arg(long, default_value_t = 2.0)]
        t_max: f64,
    },
    /// Check a configuration file
    Validate {
        #[command(flatten)]
        config: ConfigArg,
    },
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code. Diagnostics go to stderr, summaries to stdout.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            report(&e);
            e.exit_code()
        }
    }
}

fn report(e: &CliError) {
    match e {
        CliError::Core(DimerError::Validation(list)) => {
            eprintln!("error: invalid configuration");
            for item in &list.0 {
                eprintln!("  - {item}");
            }
        }
        other => eprintln!("error: {other}"),
    }
}

fn load(arg: &ConfigArg) -> Result<SystemConfig, CliError> {
    Ok(SystemConfig::from_json_file(&arg.config)?)
}

fn with_thermal(mut config: SystemConfig, thermal: ThermalSpec) -> Result<SystemConfig, CliError> {
    config.thermal = thermal;
    Ok(config.validated().map_err(DimerError::from)?)
}

fn sample_times(t_min: f64, t_max: f64, steps: usize) -> Result<Vec<f64>, CliError> {
    if !(t_min.is_finite() && t_max.is_finite() && 0.0 <= t_min && t_min <= t_max) {
        return Err(CliError::Usage(format!("need 0 <= t-min <= t-max, got [{t_min}, {t_max}]")));
    }
    Ok(match steps {
        0 => Vec::new(),
        1 => vec![t_min],
        n => (0..n)
            .map(|i| {
                if i + 1 == n {
                    t_max
                } else {
                    t_min + (t_max - t_min) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    })
}

fn curve(
    name: &str,
    args: &CurveArgs,
    config: SystemConfig,
    p: impl Fn(&SystemConfig, f64) -> dimer_core::Result<f64>,
) -> Result<(), CliError> {
    let start = Instant::now();
    let samples = sample_times(args.t_min, args.t_max, args.steps)?
        .into_iter()
        .map(|t| Ok((t, p(&config, t)?)))
        .collect::<Result<Vec<_>, DimerError>>()?;
    write_curve(&args.out, &samples)?;
    let (t_best, p_best) = samples
        .iter()
        .copied()
        .fold((f64::NAN, f64::NEG_INFINITY), |best, s| if s.1 > best.1 { s } else { best });
    let mut manifest = RunManifest::new(name, ConfigFile::from(&config));
    manifest.outputs.push(args.out.clone());
    manifest.summary = json!({ "samples": samples.len(), "max_sample_t_ps": t_best, "max_sample_p12": p_best });
    manifest.write_beside(&args.out, start.elapsed())?;
    if !samples.is_empty() {
        println!("{} samples, max p12 = {p_best} at t = {t_best} ps", samples.len());
    }
    Ok(())
}

fn parse_axes(axes: &[String]) -> Result<(Axis, Option<Axis>), CliError> {
    let parsed = axes
        .iter()
        .map(|a| a.parse::<Axis>())
        .collect::<Result<Vec<_>, _>>()?;
    match <[Axis; 1]>::try_from(parsed.clone()) {
        Ok([a]) => Ok((a, None)),
        Err(_) => match <[Axis; 2]>::try_from(parsed) {
            Ok([a, b]) => Ok((a, Some(b))),
            Err(_) => Err(CliError::Usage("give one or two --axis options".into())),
        },
    }
}

fn write_json_report(out: &Path, name: &str, config: &SystemConfig, report: serde_json::Value, start: Instant) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(&report).map_err(|e| CliError::Output(e.to_string()))?;
    write_text(out, &(text + "\n"))?;
    let mut manifest = RunManifest::new(name, ConfigFile::from(config));
    manifest.outputs.push(out.to_path_buf());
    manifest.summary = report;
    manifest.write_beside(out, start.elapsed())?;
    Ok(())
}

fn branch_json(branch: &GroundStateBranch) -> serde_json::Value {
    match branch {
        GroundStateBranch::Degenerate(s) => json!({
            "branch": "degenerate",
            "first": format!("{:?}", s.first),
            "second": format!("{:?}", s.second),
            "theta": s.theta,
            "phi": s.phi,
        }),
        other => json!({ "branch": format!("{other:?}") }),
    }
}

pub fn execute(command: Command) -> Result<(), CliError> {
    let start = Instant::now();
    match command {
        Command::ZeroTemp(args) => {
            let config = with_thermal(load(&args.config)?, ThermalSpec::ZeroTemperature)?;
            if config.is_correlated() {
                return Err(CliError::Usage("correlated baths (q != 0): use correlated-zero-temp".into()));
            }
            curve("zero-temp", &args, config, p12_zero_temp)
        }
        Command::Thermal(args) => {
            let config = load(&args.config)?;
            if config.thermal.is_zero_temperature() {
                return Err(CliError::Usage("thermal needs temperature_kelvin or beta in the config".into()));
            }
            curve("thermal", &args, config, p12_thermal)
        }
        Command::CorrelatedZeroTemp(args) => {
            let config = with_thermal(load(&args.config)?, ThermalSpec::ZeroTemperature)?;
            curve("correlated-zero-temp", &args, config, p12_correlated_zero_temp)
        }
        Command::Sweep {
            config,
            axes,
            metric: Metric::MaxP,
            window,
            threads,
            out,
        } => {
            let config = load(&config)?;
            let (axis1, axis2) = parse_axes(&axes)?;
            if threads == Some(0) {
                return Err(CliError::Usage("--threads must be positive".into()));
            }
            let options = SweepOptions {
                window: window.window(),
                threads,
            };
            let grid = sweep(&config, axis1, axis2, &options)?;
            write_grid(&out, &grid)?;
            let argmax_path = output::sidecar_path(&out, "argmax.txt");
            write_argmax(&argmax_path, &grid)?;
            let mut manifest = RunManifest::new("sweep", ConfigFile::from(&config));
            manifest.axes = std::iter::once(&grid.axis1)
                .chain(grid.axis2.as_ref())
                .map(Axis::to_string)
                .collect();
            manifest.outputs = vec![out.clone(), argmax_path];
            let near_edge = options.window.near_edge(grid.argmax.t, 0.01);
            manifest.summary = json!({
                "metric": "max-p",
                "window": options.window,
                "argmax": grid.argmax,
                "p_max": grid.argmax.p,
                "t_star_ps": grid.argmax.t,
                "t_star_near_window_edge": near_edge,
            });
            manifest.write_beside(&out, start.elapsed())?;
            println!(
                "max p12 = {} at {} = {}{}, t* = {} ps",
                grid.argmax.p,
                grid.axis1.parameter,
                grid.argmax.value1,
                match (&grid.axis2, grid.argmax.value2) {
                    (Some(a), Some(v)) => format!(", {} = {v}", a.parameter),
                    _ => String::new(),
                },
                grid.argmax.t
            );
            if near_edge {
                eprintln!("warning: t* lies within 1% of the time window edge");
            }
            Ok(())
        }
        Command::Max { config, window, out } => {
            let config = load(&config)?;
            let window = window.window();
            let m = max_over_time(&config, &window)?;
            let gain = assistance_gain(&config, &window)?;
            println!("t* = {} ps, p12* = {}", m.t, m.p);
            println!("decoupled p12* = {}, gain = {}", gain.decoupled.p, gain.gain);
            if let Some(out) = out {
                let report = json!({ "t_star_ps": m.t, "p_max": m.p, "assistance_gain": gain });
                write_json_report(&out, "max", &config, report, start)?;
            }
            Ok(())
        }
        Command::Resonance { config, free, out } => {
            let config = with_thermal(load(&config)?, ThermalSpec::ZeroTemperature)?;
            let which = match free {
                Free::Gamma1 => FreeCoupling::Gamma1,
                Free::Gamma2 => FreeCoupling::Gamma2,
            };
            let solution = resonance_gamma(&config, which)?;
            match solution {
                Some(s) if s.degenerate => println!("detuning already vanishes for every value of the free coupling"),
                Some(s) => println!("resonant coupling = {}", s.gamma),
                None => println!("no non-negative coupling makes the detuning vanish"),
            }
            if let Some(out) = out {
                let report = json!({
                    "free": format!("{free:?}").to_lowercase(),
                    "gamma": solution.map(|s| s.gamma),
                    "degenerate": solution.map(|s| s.degenerate),
                });
                write_json_report(&out, "resonance", &config, report, start)?;
            }
            Ok(())
        }
        Command::GroundState { config, out } => {
            let config = with_thermal(load(&config)?, ThermalSpec::ZeroTemperature)?;
            let q0 = q_threshold(
                config.bath1.splitting,
                config.bath2.splitting,
                config.bath1.size,
                config.bath2.size,
            );
            let (branch, delta) = delta0_for_branch(&config)?;
            let assist = assistance_condition(&config)?;
            println!("q0 = {q0}");
            println!("branch = {branch:?}");
            println!("delta0 = {}", delta.value);
            println!("compensated = {}", assist.satisfied);
            if let Some(out) = out {
                let report = json!({
                    "q0": q0,
                    "ground_state": branch_json(&branch),
                    "delta0": delta.value,
                    "compensated": assist.satisfied,
                });
                write_json_report(&out, "ground-state", &config, report, start)?;
            }
            Ok(())
        }
        Command::OracleCheck {
            config,
            n1,
            n2,
            points,
            t_max,
        } => {
            let mut config = load(&config)?;
            config.bath1.size = n1.unwrap_or(config.bath1.size);
            config.bath2.size = n2.unwrap_or(config.bath2.size);
            let config = config.validated().map_err(DimerError::from)?;
            let total = config.bath1.size + config.bath2.size;
            if total > MAX_ORACLE_SPINS {
                return Err(DimerError::OracleTooLarge {
                    requested: total,
                    limit: MAX_ORACLE_SPINS,
                }
                .into());
            }
            let evolver = OracleEvolver::new(&config)?;
            let mut max_diff: f64 = 0.0;
            for t in sample_times(0.0, t_max, points)? {
                let analytic = dimer_core::dynamics::p12(&config, t)?;
                max_diff = max_diff.max((analytic - evolver.probability(t)).abs());
            }
            println!("max |dP| = {max_diff:e} over {points} points");
            if max_diff > ORACLE_TOLERANCE {
                return Err(CliError::OracleMismatch {
                    max_diff,
                    tolerance: ORACLE_TOLERANCE,
                });
            }
            Ok(())
        }
        Command::Validate { config } => {
            load(&config)?;
            println!("ok");
            Ok(())
        }
    }
}
