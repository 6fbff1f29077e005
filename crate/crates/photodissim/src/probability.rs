//! Closed-form transition probabilities P_θ(t).
//!
//! All formulas give the probability of finding an initially
//! left-circular photon in the linear polarization state θ at time t,
//! in the adiabatic regime λ ≪ ω. They are validated against the
//! trajectory route ([`prob_from_trajectory`] over the solvers), which is
//! also the only route for elliptic analyzers (φ ≠ 0).

use crate::analysis::IntensitySeries;
use crate::error::{Error, Result};
use crate::params::{DissipationCombos, HamiltonianParams};
use crate::solvers::{effective_frequency, overdamped_rate, Trajectory};
use crate::state::{expectation, projector, PolarizerAngles};

/// Probability from the adiabatic unitary map, general μ:
///
/// P = ½{1 + (μν/ω²) cos(2θ−λt)[cos(2(ω+λ_B)t−λt) − 1]
///        + (ν/ω) sin(2θ−λt) sin(2(ω+λ_B)t−λt)}
pub fn prob_adiabatic_general(p: &HamiltonianParams, theta: f64, t: f64) -> Result<f64> {
    let omega = p.require_splitting()?;
    let berry = crate::generators::berry_phase(p)?;
    let slow = 2.0 * theta - p.lambda * t;
    let fast = 2.0 * (omega + berry) * t - p.lambda * t;
    Ok(0.5
        * (1.0
            + p.mu * p.nu / (omega * omega) * slow.cos() * (fast.cos() - 1.0)
            + p.nu / omega * slow.sin() * fast.sin()))
}

/// μ = 0 form: P = ½{1 + ½[cos(2ωt+λt−2θ) + cos(2ωt−λt+2θ+π)]}.
pub fn prob_adiabatic_mu0(omega: f64, lambda: f64, theta: f64, t: f64) -> f64 {
    0.5 * (1.0
        + 0.5
            * ((2.0 * omega * t + lambda * t - 2.0 * theta).cos()
                + (2.0 * omega * t - lambda * t + 2.0 * theta + std::f64::consts::PI).cos()))
}

/// Underdamped depolarizing channel (α < 2ω):
///
/// P = ½{1 + (ω/2Ω) e^{−αt} [cos(2Ωt+λt−2θ) + cos(2Ωt−λt+2θ+π)]},
/// Ω = (ω² − α²/4)^{1/2}.
pub fn prob_dissipative(omega: f64, alpha: f64, lambda: f64, theta: f64, t: f64) -> Result<f64> {
    if omega <= 0.0 {
        return Err(Error::DegenerateHamiltonian);
    }
    if alpha < 0.0 || alpha >= 2.0 * omega {
        return Err(Error::UnsupportedRegime(format!(
            "underdamped formula needs 0 <= alpha < 2*omega, got alpha = {alpha}, omega = {omega}"
        )));
    }
    let big = effective_frequency(omega, alpha);
    let damp = (-alpha * t).exp();
    Ok(0.5
        * (1.0
            + omega / (2.0 * big)
                * damp
                * ((2.0 * big * t + lambda * t - 2.0 * theta).cos()
                    + (2.0 * big * t - lambda * t + 2.0 * theta + std::f64::consts::PI).cos())))
}

/// Overdamped depolarizing channel (α > 2ω), hyperbolic continuation:
///
/// P = ½{1 + (ω/Ω̄) e^{−αt} sinh(2Ω̄t) sin(2θ−λt)}, Ω̄ = (α²/4 − ω²)^{1/2}.
pub fn prob_overdamped(omega: f64, alpha: f64, lambda: f64, theta: f64, t: f64) -> Result<f64> {
    if omega <= 0.0 {
        return Err(Error::DegenerateHamiltonian);
    }
    if alpha <= 2.0 * omega {
        return Err(Error::UnsupportedRegime(format!(
            "overdamped formula needs alpha > 2*omega, got alpha = {alpha}, omega = {omega}"
        )));
    }
    let bar = overdamped_rate(omega, alpha);
    // e^{−αt} sinh(2Ω̄t) with non-positive exponents
    let damped_sinh = (((2.0 * bar - alpha) * t).exp() - (-(2.0 * bar + alpha) * t).exp()) / 2.0;
    Ok(0.5 * (1.0 + omega / bar * damped_sinh * (2.0 * theta - lambda * t).sin()))
}

const RESONANCE_FLOOR: f64 = 1e-9;

fn check_denominator(name: &'static str, value: f64) -> Result<f64> {
    if value.abs() < RESONANCE_FLOOR {
        Err(Error::ResonantDenominator { name, value })
    } else {
        Ok(value)
    }
}

/// Secular amplitude multiplying cos(2θ−λt) in the first-order formula.
fn delta_term(
    omega: f64,
    lambda: f64,
    b_mag: f64,
    phi_b: f64,
    c_mag: f64,
    phi_c: f64,
    t: f64,
) -> Result<f64> {
    let two_wp = check_denominator("2*omega + lambda", 2.0 * omega + lambda)?;
    let two_wm = check_denominator("2*omega - lambda", 2.0 * omega - lambda)?;
    let wp = check_denominator("omega + lambda", omega + lambda)?;
    let wm = check_denominator("omega - lambda", omega - lambda)?;
    let c_part = c_mag / 2.0
        * (2.0 * lambda / (two_wp * two_wm) * phi_c.sin()
            - (2.0 * omega * t + lambda * t - phi_c).sin() / two_wp
            - (2.0 * omega * t - lambda * t + phi_c).sin() / two_wm);
    let b_part = b_mag / 8.0
        * (2.0 * omega / (wp * wm) * phi_b.sin()
            + (2.0 * omega * t - 2.0 * lambda * t - phi_b).sin() / wm
            - (2.0 * omega * t + 2.0 * lambda * t + phi_b).sin() / wp);
    Ok(c_part + b_part)
}

/// Secular amplitude subtracted inside the sin(2θ−λt) bracket.
fn phi_term(
    omega: f64,
    lambda: f64,
    b_mag: f64,
    phi_b: f64,
    c_mag: f64,
    phi_c: f64,
    t: f64,
) -> Result<f64> {
    let two_wp = check_denominator("2*omega + lambda", 2.0 * omega + lambda)?;
    let two_wm = check_denominator("2*omega - lambda", 2.0 * omega - lambda)?;
    let four_wm = check_denominator("4*omega - lambda", 4.0 * omega - lambda)?;
    let four_wp = check_denominator("4*omega + lambda", 4.0 * omega + lambda)?;
    let b_part = b_mag / 4.0
        * (lambda * t + phi_b).sin()
        * (((2.0 * omega + lambda) * t).sin() / two_wp
            - ((2.0 * omega - lambda) * t).sin() / two_wm);
    let c_part = 2.0
        * c_mag
        * (lambda * t / 2.0 - phi_c).sin()
        * (((2.0 * omega - lambda / 2.0) * t).sin() / four_wm
            + ((2.0 * omega + lambda / 2.0) * t).sin() / four_wp);
    Ok(b_part + c_part)
}

/// First-order-in-dissipation probability (μ = 0), damping factor
/// e^{−(D+A/2)t} resummed:
///
/// P = ½ + (e^{−(D+A/2)t}/2) {−Δ(t) cos(2θ−λt)
///     + [(1 + (|B|/2λ) sinλt sin(λt+φ_B)) sin2ωt − Φ(t)] sin(2θ−λt)}
pub fn prob_perturbative(
    p: &HamiltonianParams,
    combos: &DissipationCombos,
    theta: f64,
    t: f64,
) -> Result<f64> {
    let omega = p.require_splitting()?;
    if p.mu != 0.0 {
        return Err(Error::UnsupportedRegime(format!(
            "first-order formula is derived at mu = 0, got mu = {}",
            p.mu
        )));
    }
    let lambda = p.lambda;
    let b_mag = combos.conj_coupling.norm();
    let c_mag = combos.cross_coupling.norm();
    let (phi_b, phi_c) = (combos.conj_phase, combos.cross_phase);

    let modulation = if b_mag > 0.0 {
        let lam = check_denominator("lambda", lambda)?;
        1.0 + b_mag / (2.0 * lam) * (lam * t).sin() * (lam * t + phi_b).sin()
    } else {
        1.0
    };
    let delta = delta_term(omega, lambda, b_mag, phi_b, c_mag, phi_c, t)?;
    let phi = phi_term(omega, lambda, b_mag, phi_b, c_mag, phi_c, t)?;

    let damp = (-(combos.exchange + combos.damping / 2.0) * t).exp();
    let slow = 2.0 * theta - lambda * t;
    Ok(0.5
        + damp / 2.0
            * (-delta * slow.cos() + (modulation * (2.0 * omega * t).sin() - phi) * slow.sin()))
}

/// Band outside which a raw trajectory probability is an error.
const PROB_RAW_BAND: f64 = 1e-6;

/// Pointwise analyzer intensity along a trajectory. Raw values are
/// checked against [−1e-6, 1+1e-6] and then clipped to [0, 1].
pub fn prob_from_trajectory(traj: &Trajectory, angles: PolarizerAngles) -> Result<IntensitySeries> {
    let obs = projector(angles);
    let mut values = Vec::with_capacity(traj.len());
    for (index, state) in traj.states.iter().enumerate() {
        let raw = expectation(&obs, state)?;
        if !(-PROB_RAW_BAND..=1.0 + PROB_RAW_BAND).contains(&raw) {
            return Err(Error::ProbabilityOutOfRange { value: raw, index });
        }
        values.push(raw.clamp(0.0, 1.0));
    }
    IntensitySeries::new(traj.times.clone(), values)
}
