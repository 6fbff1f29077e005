//! Model parameters: birefringence hamiltonian, dissipation rates, and the
//! complete-positivity gate.
//!
//! Natural units ħ = 1 throughout: every parameter is an angular frequency
//! and time is its inverse.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, C64};

/// Parameters of the time-dependent 2×2 hamiltonian
/// `[[ω₀+μ, ν e^{−iλt}], [ν e^{iλt}, ω₀−μ]]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianParams {
    /// Average photon energy ω₀. Contributes only a global phase and is
    /// kept for reporting.
    pub omega0: f64,
    /// Diagonal part of the level splitting.
    pub mu: f64,
    /// Off-diagonal coupling strength.
    pub nu: f64,
    /// Modulation frequency of the optical medium.
    pub lambda: f64,
}

/// λ/ω ratio above which the adiabatic approximation is flagged.
pub const ADIABATIC_WARN_RATIO: f64 = 0.1;

impl HamiltonianParams {
    pub fn new(omega0: f64, mu: f64, nu: f64, lambda: f64) -> Self {
        Self {
            omega0,
            mu,
            nu,
            lambda,
        }
    }

    /// Level splitting ω = (μ² + ν²)^{1/2}.
    pub fn splitting(&self) -> f64 {
        self.mu.hypot(self.nu)
    }

    /// λ/ω; infinite when the splitting vanishes.
    pub fn adiabaticity_ratio(&self) -> f64 {
        let omega = self.splitting();
        if omega == 0.0 {
            f64::INFINITY
        } else {
            self.lambda.abs() / omega
        }
    }

    pub(crate) fn require_splitting(&self) -> Result<f64> {
        let omega = self.splitting();
        if omega <= 0.0 {
            Err(Error::DegenerateHamiltonian)
        } else {
            Ok(omega)
        }
    }
}

/// The six real constants parametrizing the dissipative generator.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DissipationParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl DissipationParams {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Purely depolarizing channel of the γ = 0 family: a = α, rest zero.
    pub fn isotropic(alpha: f64) -> Self {
        Self {
            a: alpha,
            alpha,
            ..Self::default()
        }
    }

    pub fn is_zero(&self) -> bool {
        self.a == 0.0
            && self.b == 0.0
            && self.c == 0.0
            && self.alpha == 0.0
            && self.beta == 0.0
            && self.gamma == 0.0
    }

    pub fn max_rate(&self) -> f64 {
        [self.a, self.b, self.c, self.alpha, self.beta, self.gamma]
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn combos(&self) -> DissipationCombos {
        DissipationCombos::from_params(self)
    }

    /// Evaluate the ten complete-positivity conditions.
    pub fn validate_cp(&self) -> ValidationReport {
        validate_cp(self)
    }
}

/// Derived combinations of the dissipation parameters:
/// A = α + a, B = α − a + 2ib, C = c + iβ, D = γ, plus the
/// half-differences 2R = α+γ−a, 2S = a+γ−α, 2T = a+α−γ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DissipationCombos {
    /// A = α + a: common damping rate of the coherence pair.
    pub damping: f64,
    /// B = α − a + 2ib: coupling between the two coherences.
    pub conj_coupling: C64,
    /// C = c + iβ: population–coherence coupling.
    pub cross_coupling: C64,
    /// D = γ: population exchange rate.
    pub exchange: f64,
    /// Principal phase of B (0 when B vanishes).
    pub conj_phase: f64,
    /// Principal phase of C (0 when C vanishes).
    pub cross_phase: f64,
    /// (α + γ − a)/2
    pub r: f64,
    /// (a + γ − α)/2
    pub s: f64,
    /// (a + α − γ)/2
    pub t: f64,
}

fn principal_phase(z: C64) -> f64 {
    if z.norm() == 0.0 {
        0.0
    } else {
        z.arg()
    }
}

impl DissipationCombos {
    pub fn from_params(p: &DissipationParams) -> Self {
        let conj_coupling = c(p.alpha - p.a, 2.0 * p.b);
        let cross_coupling = c(p.c, p.beta);
        Self {
            damping: p.alpha + p.a,
            conj_coupling,
            cross_coupling,
            exchange: p.gamma,
            conj_phase: principal_phase(conj_coupling),
            cross_phase: principal_phase(cross_coupling),
            r: (p.alpha + p.gamma - p.a) / 2.0,
            s: (p.a + p.gamma - p.alpha) / 2.0,
            t: (p.a + p.alpha - p.gamma) / 2.0,
        }
    }

    /// Rebuild combos (phases and half-differences included) from the four
    /// rates; inverse of the matrix parametrization.
    pub fn from_rates(
        damping: f64,
        conj_coupling: C64,
        cross_coupling: C64,
        exchange: f64,
    ) -> Self {
        let params = DissipationParams {
            a: (damping - conj_coupling.re) / 2.0,
            b: conj_coupling.im / 2.0,
            c: cross_coupling.re,
            alpha: (damping + conj_coupling.re) / 2.0,
            beta: cross_coupling.im,
            gamma: exchange,
        };
        Self::from_params(&params)
    }

    pub fn to_params(&self) -> DissipationParams {
        DissipationParams {
            a: (self.damping - self.conj_coupling.re) / 2.0,
            b: self.conj_coupling.im / 2.0,
            c: self.cross_coupling.re,
            alpha: (self.damping + self.conj_coupling.re) / 2.0,
            beta: self.cross_coupling.im,
            gamma: self.exchange,
        }
    }
}

/// Outcome of one complete-positivity condition.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CpCondition {
    pub name: &'static str,
    /// Left-hand side of `… ≥ 0`; negative means violated.
    pub residual: f64,
    pub satisfied: bool,
}

/// Pass/fail record of the ten complete-positivity inequalities, in
/// canonical order: sign conditions, linear, quadratic, quartic.
#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub conditions: Vec<CpCondition>,
}

impl ValidationReport {
    pub fn is_cp(&self) -> bool {
        self.conditions.iter().all(|c| c.satisfied)
    }

    /// First violated condition in canonical order, if any.
    pub fn first_violation(&self) -> Option<&CpCondition> {
        self.conditions.iter().find(|c| !c.satisfied)
    }

    pub fn violations(&self) -> impl Iterator<Item = &CpCondition> {
        self.conditions.iter().filter(|c| !c.satisfied)
    }

    pub fn condition(&self, name: &str) -> Option<&CpCondition> {
        self.conditions.iter().find(|c| c.name == name)
    }
}

/// Evaluate the ten inequalities the six rates must satisfy for the
/// generated map to be completely positive. Never fails; the report
/// carries the verdict and each residual.
pub fn validate_cp(p: &DissipationParams) -> ValidationReport {
    let combos = p.combos();
    let (r, s, t) = (combos.r, combos.s, combos.t);
    let quartic =
        r * s * t - 2.0 * p.b * p.c * p.beta - r * p.beta * p.beta - s * p.c * p.c - t * p.b * p.b;

    let raw: [(&'static str, f64); 10] = [
        ("a >= 0", p.a),
        ("alpha >= 0", p.alpha),
        ("gamma >= 0", p.gamma),
        ("R >= 0", r),
        ("S >= 0", s),
        ("T >= 0", t),
        ("RS - b^2 >= 0", r * s - p.b * p.b),
        ("RT - c^2 >= 0", r * t - p.c * p.c),
        ("ST - beta^2 >= 0", s * t - p.beta * p.beta),
        ("RST - 2bc.beta - R.beta^2 - S.c^2 - T.b^2 >= 0", quartic),
    ];

    ValidationReport {
        conditions: raw
            .iter()
            .map(|&(name, residual)| CpCondition {
                name,
                residual,
                satisfied: residual >= 0.0,
            })
            .collect(),
    }
}
