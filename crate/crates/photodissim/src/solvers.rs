//! Time evolution of vectorized polarization states.
//!
//! Five routes are provided:
//!
//! - [`evolve_numerical`]: fixed-step RK4 on the lab-frame equation
//!   ∂|ρ⟩/∂t = [𝓗(t) + 𝓛]|ρ⟩. Works for any parameters, including
//!   non-completely-positive ones (useful to demonstrate positivity
//!   violations).
//! - [`evolve_adiabatic_numerical`]: RK4 on the instantaneous-eigenframe
//!   equation ∂|ρ̃⟩/∂t = [𝓗_eff + 𝓛̃(t)]|ρ̃⟩ with the diagonal adiabatic
//!   generator. This is the numerical oracle for the closed forms below,
//!   which solve exactly this equation.
//! - [`evolve_adiabatic_unitary`]: dissipation-free closed form
//!   |ρ(t)⟩ = 𝓤†(t) e^{𝓗_eff t} 𝓤(0) |ρ(0)⟩.
//! - [`evolve_exact_dissipative`]: closed form for the purely depolarizing
//!   channel (a = α, rest zero) at μ = 0, a damped block propagator with
//!   shifted frequency Ω = (ω² − α²/4)^{1/2}; hyperbolic continuation in
//!   the overdamped branch α > 2ω.
//! - [`evolve_perturbative`]: first-order expansion of the eigenframe
//!   propagator in the dissipator, with the interaction-picture integral
//!   evaluated by composite Simpson quadrature.
//!
//! The lab-frame and eigenframe dynamics differ at order λ/ω (the
//! off-diagonal frame terms the adiabatic generator drops), so the two
//! numerical routes bracket the closed forms: the eigenframe route agrees
//! with them to integrator accuracy, the lab-frame route to O(λ/ω).
//!
//! The exact 2×2 propagator [`exact_unitary_propagator`] is kept as an
//! independent oracle: it is valid for any modulation frequency and
//! validates both the adiabatic truncation and the Berry-phase diagonal.

use crate::error::{Error, Result};
use crate::generators::{
    basis_change, dissipator_superop, effective_hamiltonian_adiabatic, hamiltonian_superop,
    transformed_dissipator, Superoperator,
};
use crate::linalg::{c, Mat2, Mat4, C64};
use crate::params::{DissipationParams, HamiltonianParams, ADIABATIC_WARN_RATIO};
use crate::state::StateVector4;

/// Propagation method.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolverKind {
    /// RK4 on the lab-frame generator 𝓗(t) + 𝓛.
    Numerical,
    /// RK4 on the eigenframe generator 𝓗_eff + 𝓛̃(t).
    AdiabaticNumerical,
    /// Closed-form unitary evolution in the adiabatic approximation.
    AdiabaticUnitary,
    /// Closed-form damped evolution for the depolarizing channel at μ = 0.
    ExactDissipative,
    /// First-order interaction-picture expansion in the dissipator.
    Perturbative,
}

impl SolverKind {
    pub fn name(&self) -> &'static str {
        match self {
            SolverKind::Numerical => "numerical",
            SolverKind::AdiabaticNumerical => "adiabatic_numerical",
            SolverKind::AdiabaticUnitary => "adiabatic_unitary",
            SolverKind::ExactDissipative => "exact_dissipative",
            SolverKind::Perturbative => "perturbative",
        }
    }
}

/// Mid-run guard on trace drift of the raw integrator state.
const TRACE_DRIFT_GUARD: f64 = 1e-8;
/// Ratio max(rates)/ω above which the perturbative solver warns.
const PERTURBATIVE_WARN_RATIO: f64 = 0.1;

pub const DEFAULT_SAMPLES: usize = 2048;

/// Everything needed to run one evolution.
#[derive(Clone, Copy, Debug)]
pub struct EvolutionSpec {
    pub hamiltonian: HamiltonianParams,
    pub dissipation: DissipationParams,
    pub initial: StateVector4,
    pub t_final: f64,
    /// Integrator step bound; `None` picks 0.01·min(1/ω, 1/λ).
    pub dt: Option<f64>,
    /// Number of stored grid points; `None` picks [`DEFAULT_SAMPLES`].
    pub samples: Option<usize>,
    pub solver: SolverKind,
}

impl EvolutionSpec {
    pub fn new(
        hamiltonian: HamiltonianParams,
        dissipation: DissipationParams,
        initial: StateVector4,
        t_final: f64,
        solver: SolverKind,
    ) -> Self {
        Self {
            hamiltonian,
            dissipation,
            initial,
            t_final,
            dt: None,
            samples: None,
            solver,
        }
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = Some(dt);
        self
    }

    pub fn with_samples(mut self, samples: usize) -> Self {
        self.samples = Some(samples);
        self
    }

    /// Integrator step: 0.01 of the fastest time scale in play unless
    /// overridden.
    pub fn resolved_dt(&self) -> f64 {
        if let Some(dt) = self.dt {
            return dt;
        }
        let mut scale = f64::INFINITY;
        let omega = self.hamiltonian.splitting();
        if omega > 0.0 {
            scale = scale.min(1.0 / omega);
        }
        if self.hamiltonian.lambda != 0.0 {
            scale = scale.min(1.0 / self.hamiltonian.lambda.abs());
        }
        let rate = self.dissipation.max_rate();
        if rate > 0.0 {
            scale = scale.min(1.0 / rate);
        }
        if !scale.is_finite() {
            scale = if self.t_final > 0.0 {
                self.t_final
            } else {
                1.0
            };
        }
        0.01 * scale
    }

    pub fn resolved_samples(&self) -> usize {
        if self.t_final == 0.0 {
            1
        } else {
            self.samples.unwrap_or(DEFAULT_SAMPLES).max(2)
        }
    }

    /// Output grid: uniformly spaced points covering [0, t_final].
    pub fn grid(&self) -> Vec<f64> {
        let n = self.resolved_samples();
        if n == 1 {
            return vec![0.0];
        }
        let step = self.t_final / (n - 1) as f64;
        (0..n)
            .map(|k| {
                if k + 1 == n {
                    self.t_final
                } else {
                    k as f64 * step
                }
            })
            .collect()
    }

    fn validate(&self) -> Result<()> {
        if self.t_final.is_nan() || self.t_final < 0.0 {
            return Err(Error::UnsupportedRegime(format!(
                "t_final must be >= 0, got {}",
                self.t_final
            )));
        }
        let dt = self.resolved_dt();
        if dt.is_nan() || dt <= 0.0 {
            return Err(Error::UnsupportedRegime(format!(
                "dt must be > 0, got {dt}"
            )));
        }
        if matches!(
            self.solver,
            SolverKind::Numerical | SolverKind::AdiabaticNumerical
        ) {
            let omega = self.hamiltonian.splitting();
            let mut bound = f64::INFINITY;
            if omega > 0.0 {
                bound = bound.min(0.05 / omega);
            }
            if self.hamiltonian.lambda != 0.0 {
                bound = bound.min(0.05 / self.hamiltonian.lambda.abs());
            }
            if dt > bound {
                return Err(Error::UnsupportedRegime(format!(
                    "dt = {dt} exceeds the resolution bound {bound:.3e}"
                )));
            }
        }
        let trace_dev = self.initial.trace_deviation();
        let herm_dev = self.initial.hermiticity_deviation();
        if trace_dev > 1e-6 || herm_dev > 1e-6 {
            return Err(Error::NonPhysicalState(format!(
                "initial state: trace dev {trace_dev:.3e}, hermiticity dev {herm_dev:.3e}"
            )));
        }
        Ok(())
    }

    /// Regime warnings for this run (adiabaticity, complete positivity,
    /// overdamping, perturbation size). Never errors.
    pub fn warnings(&self) -> Vec<Warning> {
        let mut out = Vec::new();
        let ratio = self.hamiltonian.adiabaticity_ratio();
        let adiabatic_solver = matches!(
            self.solver,
            SolverKind::AdiabaticNumerical
                | SolverKind::AdiabaticUnitary
                | SolverKind::ExactDissipative
                | SolverKind::Perturbative
        );
        if adiabatic_solver && ratio > ADIABATIC_WARN_RATIO {
            out.push(Warning::Adiabaticity { ratio });
        }
        let report = self.dissipation.validate_cp();
        if !report.is_cp() {
            out.push(Warning::NonCompletelyPositive {
                condition: report.first_violation().map(|v| v.name).unwrap_or(""),
            });
        }
        let omega = self.hamiltonian.splitting();
        if self.dissipation.alpha > 2.0 * omega && self.dissipation.alpha > 0.0 {
            out.push(Warning::Overdamped);
        }
        if matches!(self.solver, SolverKind::Perturbative) && omega > 0.0 {
            let r = self.dissipation.max_rate() / omega;
            if r > PERTURBATIVE_WARN_RATIO {
                out.push(Warning::LargeDissipation { ratio: r });
            }
        }
        out
    }
}

/// Non-fatal regime diagnostics attached to a run.
#[derive(Clone, Debug, PartialEq)]
pub enum Warning {
    Adiabaticity { ratio: f64 },
    NonCompletelyPositive { condition: &'static str },
    Overdamped,
    LargeDissipation { ratio: f64 },
}

impl std::fmt::Display for Warning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Warning::Adiabaticity { ratio } => write!(
                f,
                "adiabaticity ratio lambda/omega = {ratio:.3} exceeds {ADIABATIC_WARN_RATIO}"
            ),
            Warning::NonCompletelyPositive { condition } => {
                write!(
                    f,
                    "dissipation parameters violate complete positivity ({condition})"
                )
            }
            Warning::Overdamped => write!(f, "overdamped regime: alpha > 2*omega"),
            Warning::LargeDissipation { ratio } => write!(
                f,
                "dissipation/omega ratio {ratio:.3} too large for first-order treatment"
            ),
        }
    }
}

/// Time-ordered states on the output grid, with drift diagnostics taken
/// before re-symmetrization.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<StateVector4>,
    /// Largest |ρ₁+ρ₂−1| observed on raw stored states.
    pub max_trace_dev: f64,
    /// Largest hermiticity deviation observed on raw stored states.
    pub max_herm_dev: f64,
}

impl Trajectory {
    fn from_raw(times: Vec<f64>, raw: Vec<[C64; 4]>) -> Self {
        let mut max_trace_dev = 0.0f64;
        let mut max_herm_dev = 0.0f64;
        let states = raw
            .into_iter()
            .map(|v| {
                let sv = StateVector4(v);
                max_trace_dev = max_trace_dev.max(sv.trace_deviation());
                max_herm_dev = max_herm_dev.max(sv.hermiticity_deviation());
                sv.resymmetrized()
            })
            .collect();
        Trajectory {
            times,
            states,
            max_trace_dev,
            max_herm_dev,
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Smallest density-matrix eigenvalue along the trajectory.
    pub fn min_eigenvalue(&self) -> f64 {
        self.states
            .iter()
            .map(|s| s.min_eigenvalue())
            .fold(f64::INFINITY, f64::min)
    }
}

/// Dispatch on `spec.solver`.
pub fn evolve(spec: &EvolutionSpec) -> Result<Trajectory> {
    match spec.solver {
        SolverKind::Numerical => evolve_numerical(spec),
        SolverKind::AdiabaticNumerical => evolve_adiabatic_numerical(spec),
        SolverKind::AdiabaticUnitary => evolve_adiabatic_unitary(spec),
        SolverKind::ExactDissipative => evolve_exact_dissipative(spec),
        SolverKind::Perturbative => evolve_perturbative(spec),
    }
}

/// Classical RK4 with fixed step bound, landing exactly on each grid point.
fn rk4_on_grid<F>(grid: &[f64], y0: [C64; 4], max_dt: f64, rhs: F) -> Result<Vec<[C64; 4]>>
where
    F: Fn(f64, &[C64; 4]) -> [C64; 4],
{
    let mut states = Vec::with_capacity(grid.len());
    let mut y = y0;
    states.push(y);
    for w in grid.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        let span = t1 - t0;
        let n_sub = (span / max_dt).ceil().max(1.0) as usize;
        let h = span / n_sub as f64;
        for k in 0..n_sub {
            let t = t0 + k as f64 * h;
            y = rk4_step(t, &y, h, &rhs);
        }
        let drift = (y[0] + y[1] - c(1.0, 0.0)).norm();
        if drift > TRACE_DRIFT_GUARD {
            return Err(Error::StepTooLarge { drift, t: t1 });
        }
        states.push(y);
    }
    Ok(states)
}

fn rk4_step<F>(t: f64, y: &[C64; 4], h: f64, rhs: &F) -> [C64; 4]
where
    F: Fn(f64, &[C64; 4]) -> [C64; 4],
{
    let k1 = rhs(t, y);
    let k2 = rhs(t + h / 2.0, &axpy(y, &k1, h / 2.0));
    let k3 = rhs(t + h / 2.0, &axpy(y, &k2, h / 2.0));
    let k4 = rhs(t + h, &axpy(y, &k3, h));
    let mut out = *y;
    for i in 0..4 {
        out[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);
    }
    out
}

fn axpy(y: &[C64; 4], k: &[C64; 4], h: f64) -> [C64; 4] {
    let mut out = *y;
    for i in 0..4 {
        out[i] += k[i] * h;
    }
    out
}

/// RK4 on the lab-frame master equation with generator 𝓗(t) + 𝓛.
pub fn evolve_numerical(spec: &EvolutionSpec) -> Result<Trajectory> {
    spec.validate()?;
    let grid = spec.grid();
    let dissipator = dissipator_superop(&spec.dissipation.combos());
    let p = spec.hamiltonian;
    let rhs = move |t: f64, y: &[C64; 4]| {
        let mut out = hamiltonian_superop(&p, t).apply(y);
        let diss = dissipator.apply(y);
        for i in 0..4 {
            out[i] += diss[i];
        }
        out
    };
    let raw = rk4_on_grid(&grid, spec.initial.0, spec.resolved_dt(), rhs)?;
    Ok(Trajectory::from_raw(grid, raw))
}

/// RK4 on the eigenframe equation ∂|ρ̃⟩/∂t = [𝓗_eff + 𝓛̃(t)]|ρ̃⟩, results
/// mapped back to the lab frame. Numerical oracle for the closed forms.
pub fn evolve_adiabatic_numerical(spec: &EvolutionSpec) -> Result<Trajectory> {
    spec.validate()?;
    let heff = effective_hamiltonian_adiabatic(&spec.hamiltonian)?;
    let heff_entries = heff.entries();
    let grid = spec.grid();
    let p = spec.hamiltonian;
    let combos = spec.dissipation.combos();
    let y0 = basis_change(&p, 0.0)?.apply(&spec.initial.0);
    let rhs = move |t: f64, y: &[C64; 4]| {
        // transformed_dissipator only fails at ω = 0, which is checked above
        let tilde = transformed_dissipator(&combos, &p, t).expect("splitting checked");
        let mut out = dissipator_superop(&tilde).apply(y);
        for i in 0..4 {
            out[i] += heff_entries[i] * y[i];
        }
        out
    };
    let raw = rk4_on_grid(&grid, y0, spec.resolved_dt(), rhs)?;
    let back: Result<Vec<[C64; 4]>> = grid
        .iter()
        .zip(raw)
        .map(|(&t, y)| Ok(basis_change(&p, t)?.adjoint().apply(&y)))
        .collect();
    Ok(Trajectory::from_raw(grid, back?))
}

/// Closed-form dissipation-free evolution
/// |ρ(t)⟩ = 𝓤†(t) e^{𝓗_eff t} 𝓤(0) |ρ(0)⟩.
pub fn evolve_adiabatic_unitary(spec: &EvolutionSpec) -> Result<Trajectory> {
    spec.validate()?;
    if !spec.dissipation.is_zero() {
        return Err(Error::DissipationNotZero);
    }
    let heff = effective_hamiltonian_adiabatic(&spec.hamiltonian)?;
    let p = spec.hamiltonian;
    let grid = spec.grid();
    let y0 = basis_change(&p, 0.0)?.apply(&spec.initial.0);
    let raw: Result<Vec<[C64; 4]>> = grid
        .iter()
        .map(|&t| {
            let propagated = heff.propagator(t).apply(&y0);
            Ok(basis_change(&p, t)?.adjoint().apply(&propagated))
        })
        .collect();
    Ok(Trajectory::from_raw(grid, raw?))
}

/// Damped oscillation frequency Ω = (ω² − α²/4)^{1/2} of the depolarizing
/// channel (0 at and beyond critical damping; see [`overdamped_rate`]).
pub fn effective_frequency(omega: f64, alpha: f64) -> f64 {
    (omega * omega - alpha * alpha / 4.0).max(0.0).sqrt()
}

/// Hyperbolic rate Ω̄ = (α²/4 − ω²)^{1/2} of the overdamped branch.
pub fn overdamped_rate(omega: f64, alpha: f64) -> f64 {
    (alpha * alpha / 4.0 - omega * omega).max(0.0).sqrt()
}

/// Population block of the exact propagator with damping folded in:
/// e^{−αt} e^{αtσ₁} = [[(1+q)/2, (1−q)/2], [(1−q)/2, (1+q)/2]], q = e^{−2αt}.
fn population_block(alpha: f64, t: f64) -> Mat2 {
    let q = (-2.0 * alpha * t).exp();
    let ch = (1.0 + q) / 2.0;
    let sh = (1.0 - q) / 2.0;
    Mat2([[c(ch, 0.0), c(sh, 0.0)], [c(sh, 0.0), c(ch, 0.0)]])
}

/// Coherence block of the exact propagator with damping folded in:
/// e^{−αt} e^{−iλtσ₃} [cos2Ωt σ₀ − (iω/Ω) sin2Ωt σ₃ + (α/2Ω) sin2Ωt σ₁],
/// continued with hyperbolic functions when α > 2ω.
fn coherence_block(omega: f64, alpha: f64, lambda: f64, t: f64) -> Mat2 {
    let disc = omega * omega - alpha * alpha / 4.0;
    // cos term, ω·sin2Ωt/Ω and (α/2)·sin2Ωt/Ω, all times e^{−αt}
    let (cos_term, omega_sin, half_alpha_sin) = if disc.abs() < 1e-12 * omega * omega {
        // critical damping: cos2Ωt → 1, sin2Ωt/Ω → 2t
        let damp = (-alpha * t).exp();
        (damp, damp * 2.0 * omega * t, damp * alpha * t)
    } else if disc > 0.0 {
        let big_omega = disc.sqrt();
        let damp = (-alpha * t).exp();
        let s = (2.0 * big_omega * t).sin() / big_omega;
        (
            damp * (2.0 * big_omega * t).cos(),
            damp * omega * s,
            damp * alpha / 2.0 * s,
        )
    } else {
        // overdamped, with exponents kept non-positive to avoid overflow
        let bar = (-disc).sqrt();
        let eu = ((2.0 * bar - alpha) * t).exp();
        let ev = (-(2.0 * bar + alpha) * t).exp();
        let ch = (eu + ev) / 2.0;
        let sh = (eu - ev) / 2.0;
        (ch, omega * sh / bar, alpha / 2.0 * sh / bar)
    };
    let ephase = C64::from_polar(1.0, -lambda * t);
    Mat2([
        [
            ephase * c(cos_term, -omega_sin),
            ephase * c(half_alpha_sin, 0.0),
        ],
        [
            ephase.conj() * c(half_alpha_sin, 0.0),
            ephase.conj() * c(cos_term, omega_sin),
        ],
    ])
}

/// Full eigenframe propagator 𝓜(t) = e^{−αt} blockdiag(Θ(t), Ξ(t)).
fn exact_dissipative_propagator(omega: f64, alpha: f64, lambda: f64, t: f64) -> Mat4 {
    let pop = population_block(alpha, t);
    let coh = coherence_block(omega, alpha, lambda, t);
    let mut m = Mat4::zero();
    for i in 0..2 {
        for j in 0..2 {
            m.0[i][j] = pop.0[i][j];
            m.0[i + 2][j + 2] = coh.0[i][j];
        }
    }
    m
}

/// Closed-form damped evolution for the depolarizing channel (a = α,
/// other rates zero) at μ = 0: |ρ(t)⟩ = 𝓤†(t) 𝓜(t) 𝓤(0) |ρ(0)⟩.
pub fn evolve_exact_dissipative(spec: &EvolutionSpec) -> Result<Trajectory> {
    spec.validate()?;
    let p = spec.hamiltonian;
    let omega = p.require_splitting()?;
    if p.mu.abs() > 1e-12 * omega {
        return Err(Error::UnsupportedRegime(format!(
            "exact dissipative solution requires mu = 0, got mu = {}",
            p.mu
        )));
    }
    let d = spec.dissipation;
    let depolarizing =
        d.a == d.alpha && d.b == 0.0 && d.c == 0.0 && d.beta == 0.0 && d.gamma == 0.0;
    if !depolarizing || d.alpha < 0.0 {
        return Err(Error::UnsupportedRegime(format!(
            "exact dissipative solution requires a = alpha >= 0 and b = c = beta = gamma = 0, got {d:?}"
        )));
    }
    let grid = spec.grid();
    let y0 = basis_change(&p, 0.0)?.apply(&spec.initial.0);
    let raw: Result<Vec<[C64; 4]>> = grid
        .iter()
        .map(|&t| {
            let m = exact_dissipative_propagator(omega, d.alpha, p.lambda, t);
            let propagated = m.mul_vec(&y0);
            Ok(basis_change(&p, t)?.adjoint().apply(&propagated))
        })
        .collect();
    Ok(Trajectory::from_raw(grid, raw?))
}

/// First-order interaction-picture propagator:
/// 𝓜(t) = e^{𝓗_eff t} [1 + ∫₀ᵗ e^{−𝓗_eff t₁} 𝓛̃(t₁) e^{𝓗_eff t₁} dt₁],
/// integral by composite Simpson on the output grid refined ×4 (and no
/// coarser than the integrator step).
pub fn evolve_perturbative(spec: &EvolutionSpec) -> Result<Trajectory> {
    spec.validate()?;
    let p = spec.hamiltonian;
    let heff = effective_hamiltonian_adiabatic(&p)?;
    let combos = spec.dissipation.combos();
    let entries = heff.entries();

    // e^{−𝓗_eff t₁} 𝓛̃(t₁) e^{𝓗_eff t₁}: entrywise phase conjugation
    let integrand = |t1: f64| -> Result<Mat4> {
        let tilde = transformed_dissipator(&combos, &p, t1)?;
        let l = dissipator_superop(&tilde).0;
        let mut g = Mat4::zero();
        for i in 0..4 {
            for j in 0..4 {
                let phase = ((entries[j] - entries[i]) * t1).exp();
                g.0[i][j] = l.0[i][j] * phase;
            }
        }
        Ok(g)
    };

    let grid = spec.grid();
    let dt = spec.resolved_dt();
    let y0 = basis_change(&p, 0.0)?.apply(&spec.initial.0);
    let mut integral = Mat4::zero();
    let mut raw = Vec::with_capacity(grid.len());

    for (k, &t) in grid.iter().enumerate() {
        if k > 0 {
            let t_prev = grid[k - 1];
            let span = t - t_prev;
            // even subdivision count, at least 4, no coarser than dt
            let mut n_sub = ((span / dt).ceil() as usize).max(4);
            if n_sub % 2 == 1 {
                n_sub += 1;
            }
            let h = span / n_sub as f64;
            let mut acc = integrand(t_prev)?;
            for seg in 1..n_sub {
                let weight = if seg % 2 == 1 { 4.0 } else { 2.0 };
                let g = integrand(t_prev + seg as f64 * h)?;
                acc = acc.add(&g.scale(c(weight, 0.0)));
            }
            acc = acc.add(&integrand(t)?);
            integral = integral.add(&acc.scale(c(h / 3.0, 0.0)));
        }
        let m = Superoperator(Mat4::identity().add(&integral));
        let propagated = heff.propagator(t).compose(&m).apply(&y0);
        raw.push(basis_change(&p, t)?.adjoint().apply(&propagated));
    }
    Ok(Trajectory::from_raw(grid, raw))
}

/// Exact 2×2 propagator of the traceless hamiltonian part,
/// U(t) = e^{−iλtσ₃/2}[cosΩ₀t σ₀ − i((2μ−λ)/2Ω₀) sinΩ₀t σ₃
///        − (iν/Ω₀) sinΩ₀t σ₁], Ω₀ = ((μ−λ/2)² + ν²)^{1/2}.
///
/// The global phase e^{−iω₀t} is dropped; it cancels in ρ → UρU†.
pub fn exact_unitary_propagator(p: &HamiltonianParams, t: f64) -> Mat2 {
    let omega_rot = (p.mu - p.lambda / 2.0).hypot(p.nu);
    let (sin_over, cos_term) = if omega_rot < 1e-12 {
        (t, 1.0)
    } else {
        ((omega_rot * t).sin() / omega_rot, (omega_rot * t).cos())
    };
    let f3 = (2.0 * p.mu - p.lambda) / 2.0 * sin_over;
    let f1 = p.nu * sin_over;
    let half_phase = C64::from_polar(1.0, -p.lambda * t / 2.0);
    Mat2([
        [half_phase * c(cos_term, -f3), half_phase * c(0.0, -f1)],
        [
            half_phase.conj() * c(0.0, -f1),
            half_phase.conj() * c(cos_term, f3),
        ],
    ])
}

/// Change of basis T(t) to the instantaneous eigenvectors of H(t):
/// T = (2ω(μ+ω))^{−1/2} [[μ+ω, −ν e^{−iλt}], [ν e^{iλt}, μ+ω]].
pub fn instantaneous_basis_2x2(p: &HamiltonianParams, t: f64) -> Result<Mat2> {
    let omega = p.require_splitting()?;
    let mu_plus = p.mu + omega;
    if mu_plus <= 1e-12 * omega {
        return Err(Error::SingularGauge);
    }
    let norm = 1.0 / (2.0 * omega * mu_plus).sqrt();
    let off = C64::from_polar(p.nu, p.lambda * t);
    Ok(Mat2([
        [c(mu_plus * norm, 0.0), -off.conj() * norm],
        [off * norm, c(mu_plus * norm, 0.0)],
    ]))
}

/// Exact propagator expressed in the instantaneous eigenbasis,
/// Ũ(t) = T†(t) U(t) T(0). Diagonal up to O(λ/ω), with diagonal phases
/// e^{∓i(ω+λ_B)t}.
pub fn adiabatic_frame_propagator(p: &HamiltonianParams, t: f64) -> Result<Mat2> {
    let u = exact_unitary_propagator(p, t);
    let t_now = instantaneous_basis_2x2(p, t)?;
    let t_zero = instantaneous_basis_2x2(p, 0.0)?;
    Ok(t_now.adjoint().mul(&u).mul(&t_zero))
}

/// Largest off-diagonal magnitude of Ũ(t): the non-adiabatic transition
/// amplitude, O(λ/ω) and exactly zero at λ = 0.
pub fn adiabatic_diagonality_check(p: &HamiltonianParams, t: f64) -> Result<f64> {
    Ok(adiabatic_frame_propagator(p, t)?.max_abs_offdiag())
}
