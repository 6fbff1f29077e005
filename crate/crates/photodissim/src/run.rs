//! Scenario execution and artifact emission.
//!
//! A run evolves the configured state, derives the requested artifacts
//! (trajectory, probability curve, spectrum, fit report) and writes them
//! under the output directory. Identical config + seed produce
//! byte-identical files: floats are emitted with 17 significant digits
//! and the noise generator is seeded.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::analysis::{fit_dissipative, spectrum, FitEstimates, FitResult, IntensitySeries};
use crate::config::{ConfigError, OutputKind, ScenarioConfig};
use crate::error::Error;
use crate::params::ValidationReport;
use crate::probability::prob_from_trajectory;
use crate::solvers::{evolve, EvolutionSpec, Trajectory};

/// Artifact encoding.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    fn extension(&self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub out_dir: PathBuf,
    pub format: OutputFormat,
    pub seed: u64,
}

/// What a run produced.
#[derive(Debug)]
pub struct RunReport {
    /// Resolved configuration (defaults filled in), TOML text.
    pub config_echo: String,
    /// Regime warnings, each exactly once.
    pub warnings: Vec<String>,
    /// Files written, in emission order.
    pub artifacts: Vec<PathBuf>,
    pub wall_ms: u128,
    pub fit: Option<FitResult>,
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),

    /// Sweep axis does not name a sweepable numeric key.
    #[error("bad sweep axis '{axis}': {reason}")]
    BadAxis { axis: String, reason: String },

    /// Physics-regime violation (exit code 3).
    #[error(transparent)]
    Regime(Error),

    /// Numerical failure (exit code 4).
    #[error(transparent)]
    Numerical(Error),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        if e.is_regime_error() {
            RunError::Regime(e)
        } else {
            RunError::Numerical(e)
        }
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), RunError> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|source| RunError::Io {
            path: parent.to_path_buf(),
            source,
        })?;
    }
    std::fs::write(path, contents).map_err(|source| RunError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

fn json_array(values: impl Iterator<Item = f64>) -> String {
    let mut out = String::from("[");
    for (k, v) in values.enumerate() {
        if k > 0 {
            out.push(',');
        }
        out.push_str(&fmt17(v));
    }
    out.push(']');
    out
}

fn trajectory_text(traj: &Trajectory, format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => {
            let mut out = String::from("t,rho1_re,rho1_im,rho2_re,rho2_im,rho3_re,rho3_im\n");
            for (t, s) in traj.times.iter().zip(&traj.states) {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    fmt17(*t),
                    fmt17(s.0[0].re),
                    fmt17(s.0[0].im),
                    fmt17(s.0[1].re),
                    fmt17(s.0[1].im),
                    fmt17(s.0[2].re),
                    fmt17(s.0[2].im),
                );
            }
            out
        }
        OutputFormat::Json => {
            let col = |f: &dyn Fn(usize) -> f64| {
                json_array(traj.states.iter().enumerate().map(|(i, _)| f(i)))
            };
            format!(
                "{{\"t\":{},\"rho1_re\":{},\"rho1_im\":{},\"rho2_re\":{},\"rho2_im\":{},\"rho3_re\":{},\"rho3_im\":{}}}\n",
                json_array(traj.times.iter().copied()),
                col(&|i| traj.states[i].0[0].re),
                col(&|i| traj.states[i].0[0].im),
                col(&|i| traj.states[i].0[1].re),
                col(&|i| traj.states[i].0[1].im),
                col(&|i| traj.states[i].0[2].re),
                col(&|i| traj.states[i].0[2].im),
            )
        }
    }
}

fn probability_text(series: &IntensitySeries, format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => series.to_csv(),
        OutputFormat::Json => format!(
            "{{\"t\":{},\"p_theta\":{}}}\n",
            json_array(series.times().iter().copied()),
            json_array(series.values().iter().copied()),
        ),
    }
}

fn spectrum_text(report: &crate::analysis::SpectrumReport, format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => {
            let mut out = String::from("omega,magnitude\n");
            for (f, m) in report.frequencies.iter().zip(&report.magnitudes) {
                let _ = writeln!(out, "{},{}", fmt17(*f), fmt17(*m));
            }
            out
        }
        OutputFormat::Json => {
            let mut peaks = String::from("[");
            for (k, p) in report.peaks.iter().enumerate() {
                if k > 0 {
                    peaks.push(',');
                }
                let _ = write!(
                    peaks,
                    "{{\"frequency\":{},\"magnitude\":{}}}",
                    fmt17(p.frequency),
                    fmt17(p.magnitude)
                );
            }
            peaks.push(']');
            format!(
                "{{\"omega\":{},\"magnitude\":{},\"peaks\":{}}}\n",
                json_array(report.frequencies.iter().copied()),
                json_array(report.magnitudes.iter().copied()),
                peaks,
            )
        }
    }
}

fn fit_report_text(fit: &FitResult) -> String {
    let e = &fit.estimates;
    let mut out = String::new();
    let _ = writeln!(out, "omega={}", fmt17(e.omega));
    let _ = writeln!(out, "alpha={}", fmt17(e.alpha));
    let _ = writeln!(out, "lambda={}", fmt17(e.lambda));
    let _ = writeln!(out, "theta0={}", fmt17(e.theta0));
    let _ = writeln!(out, "amplitude={}", fmt17(e.amplitude));
    let _ = writeln!(out, "amplitude_model={}", fmt17(e.model_amplitude()));
    let _ = writeln!(out, "residual_rms={}", fmt17(fit.residual_rms));
    let _ = writeln!(out, "converged={}", fit.converged);
    let _ = writeln!(out, "iterations={}", fit.iterations);
    out
}

fn fit_report_json(fit: &FitResult) -> String {
    let e = &fit.estimates;
    format!(
        "{{\"omega\":{},\"alpha\":{},\"lambda\":{},\"theta0\":{},\"amplitude\":{},\"amplitude_model\":{},\"residual_rms\":{},\"converged\":{},\"iterations\":{}}}\n",
        fmt17(e.omega),
        fmt17(e.alpha),
        fmt17(e.lambda),
        fmt17(e.theta0),
        fmt17(e.amplitude),
        fmt17(e.model_amplitude()),
        fmt17(fit.residual_rms),
        fit.converged,
        fit.iterations,
    )
}

/// Complete-positivity report artifact.
pub fn write_cp_report(report: &ValidationReport, opts: &RunOptions) -> Result<PathBuf, RunError> {
    let path = opts
        .out_dir
        .join(format!("cp_report.{}", opts.format.extension()));
    let text = match opts.format {
        OutputFormat::Csv => {
            let mut out = String::from("condition,residual,satisfied\n");
            for c in &report.conditions {
                let _ = writeln!(out, "\"{}\",{},{}", c.name, fmt17(c.residual), c.satisfied);
            }
            out
        }
        OutputFormat::Json => {
            let mut out = String::from("[");
            for (k, c) in report.conditions.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                let _ = write!(
                    out,
                    "{{\"condition\":\"{}\",\"residual\":{},\"satisfied\":{}}}",
                    c.name,
                    fmt17(c.residual),
                    c.satisfied
                );
            }
            out.push_str("]\n");
            out
        }
    };
    write_file(&path, &text)?;
    Ok(path)
}

/// Initial fit guess derived from the generating scenario: the model
/// decay rate of the full channel is D + A/2 at first order.
fn fit_guess_from(cfg: &ScenarioConfig) -> FitEstimates {
    let combos = cfg.dissipation.combos();
    let omega = cfg.hamiltonian.splitting();
    let alpha = (combos.exchange + combos.damping / 2.0).max(0.0);
    let guess = FitEstimates {
        omega,
        alpha,
        lambda: cfg.hamiltonian.lambda,
        theta0: cfg.analyzer.theta,
        amplitude: 0.5,
    };
    FitEstimates {
        amplitude: guess.model_amplitude(),
        ..guess
    }
}

/// Execute one scenario: evolve, derive the requested artifacts, write
/// them under `opts.out_dir`. Deterministic for a given (config, seed).
pub fn run_scenario(cfg: &ScenarioConfig, opts: &RunOptions) -> Result<RunReport, RunError> {
    let start = Instant::now();
    let spec = EvolutionSpec {
        hamiltonian: cfg.hamiltonian,
        dissipation: cfg.dissipation,
        initial: cfg.initial.state_vector(),
        t_final: cfg.time.t_final,
        dt: cfg.time.dt,
        samples: Some(cfg.time.samples),
        solver: cfg.solver,
    };
    let warnings: Vec<String> = spec.warnings().iter().map(|w| w.to_string()).collect();

    let trajectory = evolve(&spec)?;
    let needs_series = cfg.outputs.iter().any(|o| {
        matches!(
            o,
            OutputKind::Probability | OutputKind::Spectrum | OutputKind::Fit
        )
    });
    let series = if needs_series {
        let clean = prob_from_trajectory(&trajectory, cfg.analyzer)?;
        Some(if cfg.noise_sigma > 0.0 {
            clean.with_noise(cfg.noise_sigma, opts.seed)
        } else {
            clean
        })
    } else {
        None
    };

    let mut artifacts = Vec::new();
    let mut fit_out = None;
    for output in &cfg.outputs {
        match output {
            OutputKind::Trajectory => {
                let path = opts
                    .out_dir
                    .join(format!("trajectory.{}", opts.format.extension()));
                write_file(&path, &trajectory_text(&trajectory, opts.format))?;
                artifacts.push(path);
            }
            OutputKind::Probability => {
                let series = series.as_ref().expect("series computed");
                let path = opts
                    .out_dir
                    .join(format!("probability.{}", opts.format.extension()));
                write_file(&path, &probability_text(series, opts.format))?;
                artifacts.push(path);
            }
            OutputKind::Spectrum => {
                let series = series.as_ref().expect("series computed");
                let report = spectrum(series, cfg.window)?;
                let path = opts
                    .out_dir
                    .join(format!("spectrum.{}", opts.format.extension()));
                write_file(&path, &spectrum_text(&report, opts.format))?;
                artifacts.push(path);
            }
            OutputKind::Fit => {
                let series = series.as_ref().expect("series computed");
                let fit = fit_dissipative(series, &fit_guess_from(cfg))?;
                let txt_path = opts.out_dir.join("fit_report.txt");
                write_file(&txt_path, &fit_report_text(&fit))?;
                artifacts.push(txt_path);
                let json_path = opts.out_dir.join("fit_report.json");
                write_file(&json_path, &fit_report_json(&fit))?;
                artifacts.push(json_path);
                fit_out = Some(fit);
            }
        }
    }

    Ok(RunReport {
        config_echo: cfg.echo_toml(),
        warnings,
        artifacts,
        wall_ms: start.elapsed().as_millis(),
        fit: fit_out,
    })
}

/// Numeric config keys a sweep may vary.
const SWEEP_AXES: &[&str] = &[
    "hamiltonian.omega0",
    "hamiltonian.mu",
    "hamiltonian.nu",
    "hamiltonian.lambda",
    "dissipation.a",
    "dissipation.b",
    "dissipation.c",
    "dissipation.alpha",
    "dissipation.beta",
    "dissipation.gamma",
    "analyzer.theta",
    "analyzer.phi",
    "time.t_final",
    "time.dt",
    "noise.sigma",
];

/// Set one numeric config key by dotted path, re-running the
/// complete-positivity gate afterwards. The sweep driver and external
/// callers share this entry point.
pub fn apply_axis(cfg: &mut ScenarioConfig, axis: &str, value: f64) -> Result<(), RunError> {
    match axis {
        "hamiltonian.omega0" => cfg.hamiltonian.omega0 = value,
        "hamiltonian.mu" => cfg.hamiltonian.mu = value,
        "hamiltonian.nu" => cfg.hamiltonian.nu = value,
        "hamiltonian.lambda" => cfg.hamiltonian.lambda = value,
        "dissipation.a" => cfg.dissipation.a = value,
        "dissipation.b" => cfg.dissipation.b = value,
        "dissipation.c" => cfg.dissipation.c = value,
        "dissipation.alpha" => cfg.dissipation.alpha = value,
        "dissipation.beta" => cfg.dissipation.beta = value,
        "dissipation.gamma" => cfg.dissipation.gamma = value,
        "analyzer.theta" => cfg.analyzer.theta = value,
        "analyzer.phi" => cfg.analyzer.phi = value,
        "time.t_final" => cfg.time.t_final = value,
        "time.dt" => cfg.time.dt = Some(value),
        "noise.sigma" => cfg.noise_sigma = value,
        other => {
            return Err(RunError::BadAxis {
                axis: other.into(),
                reason: format!("expected one of: {}", SWEEP_AXES.join(", ")),
            })
        }
    }
    // re-gate complete positivity after the edit
    cfg.cp_report = cfg.dissipation.validate_cp();
    if !cfg.cp_report.is_cp() && !cfg.noncp_allowed {
        let v = cfg.cp_report.first_violation().expect("not CP");
        return Err(RunError::Config(ConfigError::NonCpDissipation {
            condition: v.name,
            residual: v.residual,
        }));
    }
    Ok(())
}

fn sanitize_for_path(text: &str) -> String {
    text.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '.' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

/// Independent runs along one numeric config axis. Runs execute
/// concurrently; reports come back in input order. Each run writes into
/// its own `sweep_<index>_<axis>_<value>` subdirectory.
pub fn sweep(
    cfg: &ScenarioConfig,
    axis: &str,
    values: &[f64],
    opts: &RunOptions,
) -> Result<Vec<RunReport>, RunError> {
    if values.is_empty() {
        return Ok(Vec::new());
    }
    // validate every point before spawning anything
    let mut prepared = Vec::with_capacity(values.len());
    for (idx, &value) in values.iter().enumerate() {
        let mut point = cfg.clone();
        apply_axis(&mut point, axis, value)?;
        let dir = opts.out_dir.join(format!(
            "sweep_{idx:03}_{}_{}",
            sanitize_for_path(axis),
            sanitize_for_path(&format!("{value}"))
        ));
        let point_opts = RunOptions {
            out_dir: dir,
            format: opts.format,
            seed: opts.seed,
        };
        prepared.push((point, point_opts));
    }

    let results: Vec<Result<RunReport, RunError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = prepared
            .iter()
            .map(|(point, point_opts)| scope.spawn(move || run_scenario(point, point_opts)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("sweep worker panicked"))
            .collect()
    });

    let mut reports = Vec::with_capacity(results.len());
    for r in results {
        reports.push(r?);
    }
    Ok(reports)
}
