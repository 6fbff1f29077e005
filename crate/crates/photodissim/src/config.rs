//! Scenario configuration: a single TOML document describing the
//! hamiltonian, dissipation rates, initial state, analyzer, time grid,
//! solver and requested outputs.
//!
//! ```toml
//! [hamiltonian]
//! omega0 = 1.0        # required
//! mu = 0.0
//! nu = 1.0
//! lambda = 0.01
//!
//! [dissipation]
//! a = 0.05
//! alpha = 0.05
//!
//! initial_state = "L"          # L | R | linear(theta) | stokes(s1,s2,s3)
//! solver = "numerical"
//! outputs = ["probability"]
//!
//! [analyzer]
//! theta = 0.0
//! phi = 0.0
//!
//! [time]
//! t_final = 50.0
//! samples = 2048
//! ```
//!
//! Every key except `hamiltonian.omega0` has a documented default.
//! Dissipation rates must pass the complete-positivity gate unless the
//! caller opts out (`--allow-noncp`).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::Window;
use crate::params::{DissipationParams, HamiltonianParams, ValidationReport};
use crate::solvers::SolverKind;
use crate::state::{vectorize, DensityMatrix, PolarizerAngles, StateVector4};

#[derive(Debug, Error)]
pub enum ConfigError {
    /// TOML syntax or type error.
    #[error("config parse error: {0}")]
    Syntax(String),

    #[error("missing required key '{0}'")]
    MissingKey(&'static str),

    #[error("bad value for '{key}': {reason}")]
    BadValue { key: String, reason: String },

    /// Dissipation rates fail the complete-positivity inequalities.
    #[error("dissipation parameters are not completely positive: {condition} (residual {residual:.3e}); pass --allow-noncp to proceed")]
    NonCpDissipation {
        condition: &'static str,
        residual: f64,
    },
}

/// Initial polarization state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum InitialState {
    Left,
    Right,
    /// Pure linear polarization along θ.
    Linear(f64),
    /// Bloch components (s₁, s₂, s₃) in the circular basis, |s| ≤ 1.
    Stokes(f64, f64, f64),
}

impl InitialState {
    /// Parse the textual forms `L`, `R`, `linear(θ)`, `stokes(s1,s2,s3)`.
    pub fn parse(text: &str) -> Result<Self, String> {
        let t = text.trim();
        match t {
            "L" | "l" => return Ok(InitialState::Left),
            "R" | "r" => return Ok(InitialState::Right),
            _ => {}
        }
        let call = |name: &str| -> Option<&str> {
            let rest = t.strip_prefix(name)?.trim_start();
            let inner = rest.strip_prefix('(')?.strip_suffix(')')?;
            Some(inner)
        };
        if let Some(inner) = call("linear") {
            let theta: f64 = inner
                .trim()
                .parse()
                .map_err(|e| format!("linear(..) needs a number: {e}"))?;
            if !theta.is_finite() {
                return Err("linear(..) angle must be finite".into());
            }
            return Ok(InitialState::Linear(theta));
        }
        if let Some(inner) = call("stokes") {
            let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
            if parts.len() != 3 {
                return Err(format!(
                    "stokes(..) needs three components, got {}",
                    parts.len()
                ));
            }
            let mut s = [0.0f64; 3];
            for (slot, part) in s.iter_mut().zip(&parts) {
                *slot = part
                    .parse()
                    .map_err(|e| format!("stokes component '{part}': {e}"))?;
                if !slot.is_finite() {
                    return Err(format!("stokes component '{part}' must be finite"));
                }
            }
            let norm2 = s[0] * s[0] + s[1] * s[1] + s[2] * s[2];
            if norm2 > 1.0 + 1e-9 {
                return Err(format!("stokes vector norm {} exceeds 1", norm2.sqrt()));
            }
            return Ok(InitialState::Stokes(s[0], s[1], s[2]));
        }
        Err(format!(
            "unrecognized initial state '{t}'; expected L, R, linear(theta) or stokes(s1,s2,s3)"
        ))
    }

    pub fn state_vector(&self) -> StateVector4 {
        let rho = match *self {
            InitialState::Left => DensityMatrix::left(),
            InitialState::Right => DensityMatrix::right(),
            InitialState::Linear(theta) => DensityMatrix::linear(theta),
            // norm validated at parse time
            InitialState::Stokes(s1, s2, s3) => {
                DensityMatrix::from_bloch(s1, s2, s3).expect("validated at parse")
            }
        };
        vectorize(&rho)
    }
}

/// Requested artifact kinds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum OutputKind {
    Trajectory,
    Probability,
    Spectrum,
    Fit,
}

impl OutputKind {
    pub fn parse(text: &str) -> Result<Self, String> {
        match text.trim() {
            "trajectory" => Ok(OutputKind::Trajectory),
            "probability" => Ok(OutputKind::Probability),
            "spectrum" => Ok(OutputKind::Spectrum),
            "fit" => Ok(OutputKind::Fit),
            other => Err(format!(
                "unknown output '{other}'; expected trajectory, probability, spectrum or fit"
            )),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            OutputKind::Trajectory => "trajectory",
            OutputKind::Probability => "probability",
            OutputKind::Spectrum => "spectrum",
            OutputKind::Fit => "fit",
        }
    }
}

fn parse_solver(text: &str) -> Result<SolverKind, String> {
    match text.trim() {
        "numerical" => Ok(SolverKind::Numerical),
        "adiabatic_numerical" => Ok(SolverKind::AdiabaticNumerical),
        "adiabatic_unitary" => Ok(SolverKind::AdiabaticUnitary),
        "exact_dissipative" => Ok(SolverKind::ExactDissipative),
        "perturbative" => Ok(SolverKind::Perturbative),
        other => Err(format!(
            "unknown solver '{other}'; expected numerical, adiabatic_numerical, \
             adiabatic_unitary, exact_dissipative or perturbative"
        )),
    }
}

fn parse_window(text: &str) -> Result<Window, String> {
    match text.trim() {
        "rectangular" => Ok(Window::Rectangular),
        "hann" => Ok(Window::Hann),
        other => Err(format!(
            "unknown window '{other}'; expected rectangular or hann"
        )),
    }
}

/// Time grid section.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TimeGrid {
    pub t_final: f64,
    /// Integrator step; defaulted from the physics when absent.
    pub dt: Option<f64>,
    pub samples: usize,
}

pub const DEFAULT_T_FINAL: f64 = 50.0;

/// Fully validated scenario.
#[derive(Clone, Debug)]
pub struct ScenarioConfig {
    pub hamiltonian: HamiltonianParams,
    pub dissipation: DissipationParams,
    pub initial: InitialState,
    pub analyzer: PolarizerAngles,
    pub time: TimeGrid,
    pub solver: SolverKind,
    pub outputs: Vec<OutputKind>,
    pub window: Window,
    /// Additive Gaussian noise on emitted probability curves (0 = none).
    pub noise_sigma: f64,
    /// Complete-positivity report for the dissipation rates.
    pub cp_report: ValidationReport,
    /// Set when a non-CP set was admitted by override.
    pub noncp_allowed: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    hamiltonian: Option<RawHamiltonian>,
    dissipation: Option<RawDissipation>,
    initial_state: Option<String>,
    analyzer: Option<RawAnalyzer>,
    time: Option<RawTime>,
    solver: Option<String>,
    outputs: Option<Vec<String>>,
    window: Option<String>,
    noise: Option<RawNoise>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawHamiltonian {
    omega0: Option<f64>,
    mu: Option<f64>,
    nu: Option<f64>,
    lambda: Option<f64>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawDissipation {
    a: Option<f64>,
    b: Option<f64>,
    c: Option<f64>,
    alpha: Option<f64>,
    beta: Option<f64>,
    gamma: Option<f64>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawAnalyzer {
    theta: Option<f64>,
    phi: Option<f64>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawTime {
    t_final: Option<f64>,
    dt: Option<f64>,
    samples: Option<i64>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawNoise {
    sigma: Option<f64>,
}

fn finite(key: &str, value: f64) -> Result<f64, ConfigError> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(ConfigError::BadValue {
            key: key.into(),
            reason: "must be finite".into(),
        })
    }
}

fn non_negative(key: &str, value: f64) -> Result<f64, ConfigError> {
    let value = finite(key, value)?;
    if value < 0.0 {
        Err(ConfigError::BadValue {
            key: key.into(),
            reason: "must be >= 0".into(),
        })
    } else {
        Ok(value)
    }
}

/// Parse and validate a scenario document. `allow_noncp` admits
/// dissipation parameters that fail the complete-positivity gate (the
/// report still records the violations).
pub fn parse_config(text: &str, allow_noncp: bool) -> Result<ScenarioConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError::Syntax(e.to_string()))?;

    let ham = raw
        .hamiltonian
        .ok_or(ConfigError::MissingKey("hamiltonian"))?;
    let omega0 = ham
        .omega0
        .ok_or(ConfigError::MissingKey("hamiltonian.omega0"))?;
    let hamiltonian = HamiltonianParams::new(
        finite("hamiltonian.omega0", omega0)?,
        finite("hamiltonian.mu", ham.mu.unwrap_or(0.0))?,
        finite("hamiltonian.nu", ham.nu.unwrap_or(0.0))?,
        finite("hamiltonian.lambda", ham.lambda.unwrap_or(0.0))?,
    );

    let diss = raw.dissipation.unwrap_or_default();
    let dissipation = DissipationParams {
        a: non_negative("dissipation.a", diss.a.unwrap_or(0.0))?,
        b: finite("dissipation.b", diss.b.unwrap_or(0.0))?,
        c: finite("dissipation.c", diss.c.unwrap_or(0.0))?,
        alpha: non_negative("dissipation.alpha", diss.alpha.unwrap_or(0.0))?,
        beta: finite("dissipation.beta", diss.beta.unwrap_or(0.0))?,
        gamma: non_negative("dissipation.gamma", diss.gamma.unwrap_or(0.0))?,
    };
    let cp_report = dissipation.validate_cp();
    if !cp_report.is_cp() && !allow_noncp {
        let v = cp_report.first_violation().expect("not CP");
        return Err(ConfigError::NonCpDissipation {
            condition: v.name,
            residual: v.residual,
        });
    }

    let initial =
        InitialState::parse(raw.initial_state.as_deref().unwrap_or("L")).map_err(|reason| {
            ConfigError::BadValue {
                key: "initial_state".into(),
                reason,
            }
        })?;

    let analyzer_raw = raw.analyzer.unwrap_or_default();
    let analyzer = PolarizerAngles {
        theta: finite("analyzer.theta", analyzer_raw.theta.unwrap_or(0.0))?,
        phi: finite("analyzer.phi", analyzer_raw.phi.unwrap_or(0.0))?,
    };

    let time_raw = raw.time.unwrap_or_default();
    let t_final = finite("time.t_final", time_raw.t_final.unwrap_or(DEFAULT_T_FINAL))?;
    if t_final < 0.0 {
        return Err(ConfigError::BadValue {
            key: "time.t_final".into(),
            reason: "must be >= 0".into(),
        });
    }
    let dt = match time_raw.dt {
        Some(dt) => {
            let dt = finite("time.dt", dt)?;
            if dt <= 0.0 {
                return Err(ConfigError::BadValue {
                    key: "time.dt".into(),
                    reason: "must be > 0".into(),
                });
            }
            Some(dt)
        }
        None => None,
    };
    let samples = match time_raw.samples {
        Some(s) if s >= 2 => s as usize,
        Some(s) => {
            return Err(ConfigError::BadValue {
                key: "time.samples".into(),
                reason: format!("must be an integer >= 2, got {s}"),
            })
        }
        None => crate::solvers::DEFAULT_SAMPLES,
    };
    let time = TimeGrid {
        t_final,
        dt,
        samples,
    };

    let solver = parse_solver(raw.solver.as_deref().unwrap_or("numerical")).map_err(|reason| {
        ConfigError::BadValue {
            key: "solver".into(),
            reason,
        }
    })?;

    let outputs = match raw.outputs {
        None => vec![OutputKind::Probability],
        Some(list) => {
            let mut outputs = Vec::with_capacity(list.len());
            for entry in &list {
                let kind = OutputKind::parse(entry).map_err(|reason| ConfigError::BadValue {
                    key: "outputs".into(),
                    reason,
                })?;
                if !outputs.contains(&kind) {
                    outputs.push(kind);
                }
            }
            outputs
        }
    };

    let window = parse_window(raw.window.as_deref().unwrap_or("hann")).map_err(|reason| {
        ConfigError::BadValue {
            key: "window".into(),
            reason,
        }
    })?;

    let noise_sigma = non_negative(
        "noise.sigma",
        raw.noise.unwrap_or_default().sigma.unwrap_or(0.0),
    )?;

    Ok(ScenarioConfig {
        hamiltonian,
        dissipation,
        initial,
        analyzer,
        time,
        solver,
        outputs,
        window,
        noise_sigma,
        cp_report,
        noncp_allowed: allow_noncp,
    })
}

impl ScenarioConfig {
    /// Resolved scenario as a TOML echo (defaults filled in). Top-level
    /// keys come first so the text re-parses.
    pub fn echo_toml(&self) -> String {
        let h = &self.hamiltonian;
        let d = &self.dissipation;
        let mut out = String::new();
        out.push_str(&format!("initial_state = \"{}\"\n", self.initial_text()));
        out.push_str(&format!("solver = \"{}\"\n", self.solver.name()));
        let outputs: Vec<String> = self
            .outputs
            .iter()
            .map(|o| format!("\"{}\"", o.name()))
            .collect();
        out.push_str(&format!("outputs = [{}]\n", outputs.join(", ")));
        out.push_str(&format!(
            "window = \"{}\"\n",
            match self.window {
                Window::Rectangular => "rectangular",
                Window::Hann => "hann",
            }
        ));
        out.push_str("\n[hamiltonian]\n");
        out.push_str(&format!(
            "omega0 = {}\nmu = {}\nnu = {}\nlambda = {}\n",
            h.omega0, h.mu, h.nu, h.lambda
        ));
        out.push_str("\n[dissipation]\n");
        out.push_str(&format!(
            "a = {}\nb = {}\nc = {}\nalpha = {}\nbeta = {}\ngamma = {}\n",
            d.a, d.b, d.c, d.alpha, d.beta, d.gamma
        ));
        out.push_str("\n[analyzer]\n");
        out.push_str(&format!(
            "theta = {}\nphi = {}\n",
            self.analyzer.theta, self.analyzer.phi
        ));
        out.push_str("\n[time]\n");
        out.push_str(&format!("t_final = {}\n", self.time.t_final));
        if let Some(dt) = self.time.dt {
            out.push_str(&format!("dt = {dt}\n"));
        }
        out.push_str(&format!("samples = {}\n", self.time.samples));
        out.push_str("\n[noise]\n");
        out.push_str(&format!("sigma = {}\n", self.noise_sigma));
        out
    }

    fn initial_text(&self) -> String {
        match self.initial {
            InitialState::Left => "L".into(),
            InitialState::Right => "R".into(),
            InitialState::Linear(theta) => format!("linear({theta})"),
            InitialState::Stokes(s1, s2, s3) => format!("stokes({s1},{s2},{s3})"),
        }
    }
}
