//! Generators of the vectorized master equation.
//!
//! The equation ∂|ρ⟩/∂t = [𝓗(t) + 𝓛]|ρ⟩ acts on the four-vector
//! (ρ₁, ρ₂, ρ₃, ρ₄). This module builds the 2×2 hamiltonian, its 4×4
//! commutator superoperator, the dissipator, the change of basis to the
//! instantaneous eigenframe, the dissipator transformed into that frame,
//! the adiabatic effective generator, and the Berry phase.

use crate::error::Result;
use crate::linalg::{c, Mat2, Mat4, C64};
use crate::params::{DissipationCombos, HamiltonianParams};

/// 4×4 linear operator on vectorized states.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Superoperator(pub Mat4);

impl Superoperator {
    pub fn zero() -> Self {
        Superoperator(Mat4::zero())
    }

    pub fn identity() -> Self {
        Superoperator(Mat4::identity())
    }

    pub fn apply(&self, v: &[C64; 4]) -> [C64; 4] {
        self.0.mul_vec(v)
    }

    pub fn compose(&self, rhs: &Superoperator) -> Superoperator {
        Superoperator(self.0.mul(&rhs.0))
    }

    pub fn adjoint(&self) -> Superoperator {
        Superoperator(self.0.adjoint())
    }

    pub fn add(&self, rhs: &Superoperator) -> Superoperator {
        Superoperator(self.0.add(&rhs.0))
    }

    pub fn max_abs_diff(&self, rhs: &Superoperator) -> f64 {
        self.0.sub(&rhs.0).max_abs()
    }

    /// Largest magnitude in the sum of the first two rows. Zero means the
    /// generator preserves the trace ρ₁ + ρ₂.
    pub fn trace_row_deviation(&self) -> f64 {
        (0..4)
            .map(|j| (self.0 .0[0][j] + self.0 .0[1][j]).norm())
            .fold(0.0, f64::max)
    }
}

/// The 2×2 hamiltonian `[[ω₀+μ, ν e^{−iλt}], [ν e^{iλt}, ω₀−μ]]`.
pub fn hamiltonian_matrix(p: &HamiltonianParams, t: f64) -> Mat2 {
    let coupling = C64::from_polar(p.nu, -p.lambda * t);
    Mat2([
        [c(p.omega0 + p.mu, 0.0), coupling],
        [coupling.conj(), c(p.omega0 - p.mu, 0.0)],
    ])
}

/// Commutator superoperator 𝓗(t): vectorize(−i[H(t), ρ]) = 𝓗(t)·vec(ρ).
pub fn hamiltonian_superop(p: &HamiltonianParams, t: f64) -> Superoperator {
    let e_plus = C64::from_polar(p.nu, p.lambda * t); // ν e^{iλt}
    let e_minus = e_plus.conj(); // ν e^{−iλt}
    let i = c(0.0, 1.0);
    let zero = c(0.0, 0.0);
    let two_mu = c(2.0 * p.mu, 0.0);
    let m = Mat4([
        [zero, zero, e_plus, -e_minus],
        [zero, zero, -e_plus, e_minus],
        [e_minus, -e_minus, -two_mu, zero],
        [-e_plus, e_plus, zero, two_mu],
    ]);
    Superoperator(m.scale(i))
}

/// Dissipative superoperator 𝓛 in terms of the rate combinations
/// (A = damping, B = conj_coupling, C = cross_coupling, D = exchange):
///
/// ```text
///      [ −D    D   −C   −C* ]
/// 𝓛 =  [  D   −D    C    C* ]
///      [ −C*   C*  −A    B  ]
///      [ −C    C    B*  −A  ]
/// ```
pub fn dissipator_superop(combos: &DissipationCombos) -> Superoperator {
    let d = c(combos.exchange, 0.0);
    let a = c(combos.damping, 0.0);
    let b = combos.conj_coupling;
    let cc = combos.cross_coupling;
    Superoperator(Mat4([
        [-d, d, -cc, -cc.conj()],
        [d, -d, cc, cc.conj()],
        [-cc.conj(), cc.conj(), -a, b],
        [-cc, cc, b.conj(), -a],
    ]))
}

/// Unitary change of basis 𝓤(t) to the instantaneous eigenframe of the
/// hamiltonian; diagonalizes the commutator superoperator:
/// 𝓤(t) 𝓗(t) 𝓤†(t) = diag(0, 0, −2iω, 2iω).
pub fn basis_change(p: &HamiltonianParams, t: f64) -> Result<Superoperator> {
    let omega = p.require_splitting()?;
    let wp = c(omega + p.mu, 0.0);
    let wm = c(omega - p.mu, 0.0);
    let ep = C64::from_polar(p.nu, p.lambda * t); // ν e^{iλt}
    let em = ep.conj(); // ν e^{−iλt}
    let e2p = C64::from_polar(1.0, 2.0 * p.lambda * t);
    let e2m = e2p.conj();
    let m = Mat4([
        [wp, wm, ep, em],
        [wm, wp, -ep, -em],
        [-em, em, wp, -wm * e2m],
        [-ep, ep, -wm * e2p, wp],
    ]);
    Ok(Superoperator(m.scale(c(1.0 / (2.0 * omega), 0.0))))
}

/// Dissipator rates in the instantaneous eigenframe, 𝓛̃(t) = 𝓤 𝓛 𝓤†,
/// written as closed-form linear combinations of the lab-frame rates.
pub fn transformed_dissipator(
    combos: &DissipationCombos,
    p: &HamiltonianParams,
    t: f64,
) -> Result<DissipationCombos> {
    let omega = p.require_splitting()?;
    let (mu, nu) = (p.mu, p.nu);
    let w2 = omega * omega;

    let a = combos.damping;
    let d = combos.exchange;
    let b_rot = combos.conj_coupling * C64::from_polar(1.0, 2.0 * p.lambda * t); // B e^{2iλt}
    let c_rot = combos.cross_coupling * C64::from_polar(1.0, -p.lambda * t); // C e^{−iλt}
    let bracket = 2.0 * d - a + b_rot.re; // 2D − A + Re(B e^{2iλt})

    let damping = a + nu * nu / (2.0 * w2) * bracket - 2.0 * mu * nu / w2 * c_rot.re;

    let conj_inner = c(
        (1.0 - nu * nu / (2.0 * w2)) * b_rot.re,
        mu / omega * b_rot.im,
    ) + c(2.0 * mu * nu / w2 * c_rot.re, -2.0 * nu / omega * c_rot.im)
        - c(nu * nu / (2.0 * w2) * (2.0 * d - a), 0.0);
    let conj_coupling = C64::from_polar(1.0, -2.0 * p.lambda * t) * conj_inner;

    let cross_inner = c((1.0 - 2.0 * nu * nu / w2) * c_rot.re, mu / omega * c_rot.im)
        - c(mu * nu / (2.0 * w2) * bracket, 0.0)
        + c(0.0, nu / (2.0 * omega) * b_rot.im);
    let cross_coupling = C64::from_polar(1.0, p.lambda * t) * cross_inner;

    let exchange = d - nu * nu / (2.0 * w2) * bracket + 2.0 * mu * nu / w2 * c_rot.re;

    Ok(DissipationCombos::from_rates(
        damping,
        conj_coupling,
        cross_coupling,
        exchange,
    ))
}

/// Geometric phase rate λ_B = (λ/2)(1 − μ/ω) accumulated by the
/// instantaneous eigenvectors.
pub fn berry_phase(p: &HamiltonianParams) -> Result<f64> {
    let omega = p.require_splitting()?;
    Ok(p.lambda / 2.0 * (1.0 - p.mu / omega))
}

/// Diagonal adiabatic generator diag(0, 0, −2i(ω+λ_B), 2i(ω+λ_B)).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EffectiveHamiltonianDiag {
    /// Berry shift λ_B.
    pub berry_shift: f64,
    /// Shifted oscillation rate ω + λ_B.
    pub carrier: f64,
}

impl EffectiveHamiltonianDiag {
    pub fn entries(&self) -> [C64; 4] {
        [
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(0.0, -2.0 * self.carrier),
            c(0.0, 2.0 * self.carrier),
        ]
    }

    pub fn matrix(&self) -> Superoperator {
        Superoperator(Mat4::diag(self.entries()))
    }

    /// exp(𝓗_eff t) = diag(1, 1, e^{−2i(ω+λ_B)t}, e^{2i(ω+λ_B)t}).
    pub fn propagator(&self, t: f64) -> Superoperator {
        let ph = C64::from_polar(1.0, -2.0 * self.carrier * t);
        Superoperator(Mat4::diag([c(1.0, 0.0), c(1.0, 0.0), ph, ph.conj()]))
    }
}

/// Effective generator after dropping the off-diagonal frame terms.
/// Valid for λ ≪ ω; callers should surface a warning above
/// [`crate::params::ADIABATIC_WARN_RATIO`].
pub fn effective_hamiltonian_adiabatic(p: &HamiltonianParams) -> Result<EffectiveHamiltonianDiag> {
    let omega = p.require_splitting()?;
    let berry_shift = berry_phase(p)?;
    Ok(EffectiveHamiltonianDiag {
        berry_shift,
        carrier: omega + berry_shift,
    })
}
