//! Command-line front end.
//!
//! Exit codes: 0 success, 1 i/o or usage failure, 2 config error,
//! 3 physics-regime error, 4 numerical failure.
//! `PHOTODISSIM_LOG` = quiet | info | debug controls stderr diagnostics.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use photodissim::config::{parse_config, OutputKind, ScenarioConfig};
use photodissim::run::{
    run_scenario, sweep, write_cp_report, OutputFormat, RunError, RunOptions, RunReport,
};

#[derive(Parser)]
#[command(
    name = "photodissim",
    version,
    about = "Dissipative evolution of photon polarization in modulated optical media"
)]
struct Cli {
    /// Scenario file (TOML).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output directory for artifacts.
    #[arg(long, global = true, default_value = "out", value_name = "DIR")]
    out: PathBuf,

    /// Artifact encoding.
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,

    /// Seed for the noise generator.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Admit dissipation parameters that violate complete positivity.
    #[arg(long = "allow-noncp", global = true)]
    allow_noncp: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for OutputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Report the ten complete-positivity conditions for the configured
    /// dissipation parameters. Exit 0 when all pass, 2 otherwise.
    Validate,
    /// Evolve the state and write the trajectory.
    Evolve,
    /// Write the analyzer probability curve P_theta(t).
    Probability,
    /// Write the magnitude spectrum of the probability curve.
    Spectrum,
    /// Fit the damped-oscillation model and write the report.
    Fit,
    /// Re-run the scenario for each value of one numeric config key.
    Sweep {
        /// Dotted config key, e.g. dissipation.alpha.
        #[arg(long)]
        axis: String,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        values: Vec<f64>,
    },
}

#[derive(Clone, Copy, PartialEq, PartialOrd)]
enum LogLevel {
    Quiet = 0,
    Info = 1,
    Debug = 2,
}

fn log_level() -> LogLevel {
    match std::env::var("PHOTODISSIM_LOG").as_deref() {
        Ok("quiet") => LogLevel::Quiet,
        Ok("debug") => LogLevel::Debug,
        _ => LogLevel::Info,
    }
}

fn exit_code_for(err: &RunError) -> u8 {
    match err {
        RunError::Config(_) | RunError::BadAxis { .. } => 2,
        RunError::Regime(_) => 3,
        RunError::Numerical(_) => 4,
        RunError::Io { .. } => 1,
    }
}

fn load_config(cli: &Cli) -> Result<ScenarioConfig, RunError> {
    let path = cli.config.as_ref().ok_or(RunError::Config(
        photodissim::config::ConfigError::MissingKey("--config PATH"),
    ))?;
    let text = std::fs::read_to_string(path).map_err(|source| RunError::Io {
        path: path.clone(),
        source,
    })?;
    Ok(parse_config(&text, cli.allow_noncp)?)
}

fn print_report(report: &RunReport, level: LogLevel) {
    if level >= LogLevel::Debug {
        eprintln!("resolved configuration:\n{}", report.config_echo);
    }
    for warning in &report.warnings {
        if level >= LogLevel::Info {
            eprintln!("warning: {warning}");
        }
    }
    if level >= LogLevel::Info {
        for path in &report.artifacts {
            println!("wrote {}", path.display());
        }
        if let Some(fit) = &report.fit {
            println!(
                "fit: omega={:.6} alpha={:.6} lambda={:.6} rms={:.3e} converged={} iterations={}",
                fit.estimates.omega,
                fit.estimates.alpha,
                fit.estimates.lambda,
                fit.residual_rms,
                fit.converged,
                fit.iterations
            );
        }
        println!("done in {} ms", report.wall_ms);
    }
}

fn run(cli: Cli) -> Result<u8, RunError> {
    let level = log_level();
    let opts = RunOptions {
        out_dir: cli.out.clone(),
        format: cli.format.into(),
        seed: cli.seed,
    };

    match &cli.command {
        Command::Validate => {
            // parse leniently so the report is produced even for non-CP sets
            let path = cli.config.as_ref().ok_or(RunError::Config(
                photodissim::config::ConfigError::MissingKey("--config PATH"),
            ))?;
            let text = std::fs::read_to_string(path).map_err(|source| RunError::Io {
                path: path.clone(),
                source,
            })?;
            let cfg = parse_config(&text, true)?;
            for c in &cfg.cp_report.conditions {
                println!(
                    "{} {:<48} residual = {:+.6e}",
                    if c.satisfied { "PASS" } else { "FAIL" },
                    c.name,
                    c.residual
                );
            }
            let path = write_cp_report(&cfg.cp_report, &opts)?;
            if level >= LogLevel::Info {
                println!("wrote {}", path.display());
            }
            Ok(if cfg.cp_report.is_cp() { 0 } else { 2 })
        }
        Command::Sweep { axis, values } => {
            let cfg = load_config(&cli)?;
            let reports = sweep(&cfg, axis, values, &opts)?;
            for (value, report) in values.iter().zip(&reports) {
                if level >= LogLevel::Info {
                    println!("{axis} = {value}:");
                }
                print_report(report, level);
            }
            Ok(0)
        }
        simple => {
            let mut cfg = load_config(&cli)?;
            match simple {
                Command::Evolve => cfg.outputs = vec![OutputKind::Trajectory],
                Command::Probability => cfg.outputs = vec![OutputKind::Probability],
                Command::Spectrum => cfg.outputs = vec![OutputKind::Spectrum],
                Command::Fit => cfg.outputs = vec![OutputKind::Fit],
                Command::Validate | Command::Sweep { .. } => unreachable!(),
            }
            let report = run_scenario(&cfg, &opts)?;
            print_report(&report, level);
            let fit_failed = report.fit.as_ref().is_some_and(|f| !f.converged);
            Ok(if fit_failed { 4 } else { 0 })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
