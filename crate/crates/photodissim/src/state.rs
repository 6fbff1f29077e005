//! Polarization states, their four-vector form, and projective observables.
//!
//! A partially polarized photon is a 2×2 density matrix
//! `[[ρ₁, ρ₃], [ρ₄, ρ₂]]` with `ρ₄ = ρ₃*`, unit trace and non-negative
//! eigenvalues, written in the circular basis (|R⟩, |L⟩). The master
//! equation acts on the four-vector (ρ₁, ρ₂, ρ₃, ρ₄).

use crate::error::{Error, Result};
use crate::linalg::{c, Mat2, C64};

/// Hermiticity/trace tolerance for direct construction.
pub const CONSTRUCT_TOL: f64 = 1e-12;
/// Eigenvalue floor for direct construction.
pub const POSITIVITY_TOL: f64 = 1e-10;
/// Tolerance applied to externally supplied states (integrator output,
/// file input) before re-symmetrization.
pub const ACCEPT_TOL: f64 = 1e-6;

/// 2×2 hermitian, unit-trace, positive polarization state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityMatrix {
    rho1: f64,
    rho2: f64,
    rho3: C64,
}

impl DensityMatrix {
    /// Build from the independent entries; `ρ₄ = ρ₃*` is implied.
    pub fn from_entries(rho1: f64, rho2: f64, rho3: C64) -> Result<Self> {
        if (rho1 + rho2 - 1.0).abs() > CONSTRUCT_TOL {
            return Err(Error::NonPhysicalState(format!(
                "trace {} differs from 1",
                rho1 + rho2
            )));
        }
        let m = Self { rho1, rho2, rho3 };
        if m.min_eigenvalue() < -POSITIVITY_TOL {
            return Err(Error::NonPhysicalState(format!(
                "negative eigenvalue {:.3e}",
                m.min_eigenvalue()
            )));
        }
        Ok(m)
    }

    /// Validate a full 2×2 matrix (hermiticity within `CONSTRUCT_TOL`).
    pub fn from_matrix(m: &Mat2) -> Result<Self> {
        let herm = (m.0[1][0] - m.0[0][1].conj()).norm();
        let diag_im = m.0[0][0].im.abs().max(m.0[1][1].im.abs());
        if herm > CONSTRUCT_TOL || diag_im > CONSTRUCT_TOL {
            return Err(Error::NonPhysicalState(format!(
                "not hermitian (off-diag dev {herm:.3e}, diag imag {diag_im:.3e})"
            )));
        }
        Self::from_entries(m.0[0][0].re, m.0[1][1].re, m.0[0][1])
    }

    /// Right circular state |R⟩⟨R| = diag(1, 0).
    pub fn right() -> Self {
        Self {
            rho1: 1.0,
            rho2: 0.0,
            rho3: c(0.0, 0.0),
        }
    }

    /// Left circular state |L⟩⟨L| = diag(0, 1).
    pub fn left() -> Self {
        Self {
            rho1: 0.0,
            rho2: 1.0,
            rho3: c(0.0, 0.0),
        }
    }

    /// Pure linear polarization along direction θ.
    pub fn linear(theta: f64) -> Self {
        // Projector O_{θ,0}: off-diagonal e^{∓2iθ}/2.
        Self {
            rho1: 0.5,
            rho2: 0.5,
            rho3: c((2.0 * theta).cos() / 2.0, -(2.0 * theta).sin() / 2.0),
        }
    }

    /// State with the given Bloch components in the circular basis:
    /// ρ = (σ₀ + s₁σ₁ + s₂σ₂ + s₃σ₃)/2. Requires |s| ≤ 1.
    pub fn from_bloch(s1: f64, s2: f64, s3: f64) -> Result<Self> {
        let norm2 = s1 * s1 + s2 * s2 + s3 * s3;
        if norm2 > 1.0 + 1e-9 {
            return Err(Error::NonPhysicalState(format!(
                "Bloch vector norm {} exceeds 1",
                norm2.sqrt()
            )));
        }
        Ok(Self {
            rho1: (1.0 + s3) / 2.0,
            rho2: (1.0 - s3) / 2.0,
            rho3: c(s1 / 2.0, -s2 / 2.0),
        })
    }

    pub fn rho1(&self) -> f64 {
        self.rho1
    }

    pub fn rho2(&self) -> f64 {
        self.rho2
    }

    pub fn rho3(&self) -> C64 {
        self.rho3
    }

    pub fn rho4(&self) -> C64 {
        self.rho3.conj()
    }

    pub fn matrix(&self) -> Mat2 {
        Mat2([
            [c(self.rho1, 0.0), self.rho3],
            [self.rho3.conj(), c(self.rho2, 0.0)],
        ])
    }

    /// Tr ρ² ∈ [1/2, 1] for unit-trace states; 1 on pure states.
    pub fn purity(&self) -> f64 {
        self.rho1 * self.rho1 + self.rho2 * self.rho2 + 2.0 * self.rho3.norm_sqr()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let tr = self.rho1 + self.rho2;
        let gap = ((self.rho1 - self.rho2).powi(2) + 4.0 * self.rho3.norm_sqr()).sqrt();
        (tr - gap) / 2.0
    }
}

/// Vectorized density matrix: components (ρ₁, ρ₂, ρ₃, ρ₄).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StateVector4(pub [C64; 4]);

impl StateVector4 {
    pub fn trace(&self) -> C64 {
        self.0[0] + self.0[1]
    }

    /// |ρ₄ − ρ₃*|, plus any imaginary leakage on the populations.
    pub fn hermiticity_deviation(&self) -> f64 {
        let off = (self.0[3] - self.0[2].conj()).norm();
        off.max(self.0[0].im.abs()).max(self.0[1].im.abs())
    }

    pub fn trace_deviation(&self) -> f64 {
        (self.trace() - c(1.0, 0.0)).norm()
    }

    /// Fold integrator round-off back onto the hermitian manifold:
    /// real populations, ρ₃ ← (ρ₃ + ρ₄*)/2, ρ₄ = ρ₃*.
    pub fn resymmetrized(&self) -> StateVector4 {
        let rho3 = (self.0[2] + self.0[3].conj()) * 0.5;
        StateVector4([
            c(self.0[0].re, 0.0),
            c(self.0[1].re, 0.0),
            rho3,
            rho3.conj(),
        ])
    }

    /// Smaller eigenvalue of the associated 2×2 hermitian matrix
    /// (imaginary round-off is ignored).
    pub fn min_eigenvalue(&self) -> f64 {
        let r1 = self.0[0].re;
        let r2 = self.0[1].re;
        let off = ((self.0[2] + self.0[3].conj()) * 0.5).norm_sqr();
        let gap = ((r1 - r2).powi(2) + 4.0 * off).sqrt();
        (r1 + r2 - gap) / 2.0
    }
}

/// Collect the density-matrix entries into the four-vector (ρ₁, ρ₂, ρ₃, ρ₄).
pub fn vectorize(rho: &DensityMatrix) -> StateVector4 {
    StateVector4([
        c(rho.rho1(), 0.0),
        c(rho.rho2(), 0.0),
        rho.rho3(),
        rho.rho4(),
    ])
}

/// Rebuild a density matrix from a four-vector, re-symmetrizing round-off.
///
/// Rejects trace or hermiticity deviations beyond `ACCEPT_TOL`.
pub fn devectorize(v: &StateVector4) -> Result<DensityMatrix> {
    let trace_dev = v.trace_deviation();
    if trace_dev > ACCEPT_TOL {
        return Err(Error::NonPhysicalState(format!(
            "trace deviates from 1 by {trace_dev:.3e}"
        )));
    }
    let herm_dev = v.hermiticity_deviation();
    if herm_dev > ACCEPT_TOL {
        return Err(Error::NonPhysicalState(format!(
            "hermiticity deviation {herm_dev:.3e}"
        )));
    }
    let s = v.resymmetrized();
    Ok(DensityMatrix {
        rho1: s.0[0].re,
        rho2: s.0[1].re,
        rho3: s.0[2],
    })
}

/// Hermitian observable, same storage layout as the state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Observable {
    o1: f64,
    o2: f64,
    o3: C64,
}

impl Observable {
    pub fn from_matrix(m: &Mat2) -> Result<Self> {
        let herm = (m.0[1][0] - m.0[0][1].conj()).norm();
        let diag_im = m.0[0][0].im.abs().max(m.0[1][1].im.abs());
        if herm > CONSTRUCT_TOL || diag_im > CONSTRUCT_TOL {
            return Err(Error::NonPhysicalState(format!(
                "observable not hermitian (dev {:.3e})",
                herm.max(diag_im)
            )));
        }
        Ok(Self {
            o1: m.0[0][0].re,
            o2: m.0[1][1].re,
            o3: m.0[0][1],
        })
    }

    pub fn identity() -> Self {
        Self {
            o1: 1.0,
            o2: 1.0,
            o3: c(0.0, 0.0),
        }
    }

    pub fn matrix(&self) -> Mat2 {
        Mat2([
            [c(self.o1, 0.0), self.o3],
            [self.o3.conj(), c(self.o2, 0.0)],
        ])
    }
}

/// Polarizer orientation: θ fixes the linear direction, φ the ellipticity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolarizerAngles {
    pub theta: f64,
    pub phi: f64,
}

impl PolarizerAngles {
    pub fn linear(theta: f64) -> Self {
        Self { theta, phi: 0.0 }
    }
}

/// Projector onto the fully polarized state picked out by (θ, φ):
///
/// ```text
/// O = 1/2 [ 1 + sinφ sin2θ          cos2θ − i cosφ sin2θ ]
///         [ cos2θ + i cosφ sin2θ    1 − sinφ sin2θ       ]
/// ```
pub fn projector(angles: PolarizerAngles) -> Observable {
    let (s2t, c2t) = (2.0 * angles.theta).sin_cos();
    let (sp, cp) = angles.phi.sin_cos();
    Observable {
        o1: (1.0 + sp * s2t) / 2.0,
        o2: (1.0 - sp * s2t) / 2.0,
        o3: c(c2t / 2.0, -cp * s2t / 2.0),
    }
}

/// Mean value ⟨O⟩ = Tr[Oρ] = O₁ρ₁ + O₂ρ₂ + O₃ρ₄ + O₄ρ₃.
///
/// The imaginary residual must stay below 1e-8; it is discarded after the
/// check.
pub fn expectation(obs: &Observable, state: &StateVector4) -> Result<f64> {
    const IMAG_LIMIT: f64 = 1e-8;
    let o4 = obs.o3.conj();
    let val = c(obs.o1, 0.0) * state.0[0]
        + c(obs.o2, 0.0) * state.0[1]
        + obs.o3 * state.0[3]
        + o4 * state.0[2];
    if val.im.abs() > IMAG_LIMIT {
        return Err(Error::NonRealExpectation {
            imag: val.im,
            limit: IMAG_LIMIT,
        });
    }
    Ok(val.re)
}

/// Tr ρ² of a physical state.
pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.purity()
}
