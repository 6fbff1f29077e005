//! Dissipative propagation of polarized photons in time-dependent
//! optical media.
//!
//! The library evolves a 2×2 polarization density matrix under a
//! Lindblad-type master equation with a harmonically modulated
//! birefringence hamiltonian, provides the closed-form transition
//! probabilities valid in the adiabatic regime, and extracts decoherence
//! signatures (exponential damping, frequency shift ω → Ω, Berry-phase
//! splitting 2ω ± λ) from simulated intensity curves.
//!
//! Layering:
//! - [`state`]: density matrices, vectorization, projectors, expectation
//!   values.
//! - [`params`]: hamiltonian and dissipation parameters, the
//!   complete-positivity gate.
//! - [`generators`]: 4×4 superoperators, instantaneous-eigenframe basis
//!   change, transformed dissipator, Berry phase.
//! - [`solvers`]: Runge–Kutta, adiabatic-unitary, exact-dissipative and
//!   first-order perturbative propagation, plus the exact 2×2 propagator
//!   used as an independent oracle.
//! - [`probability`]: closed-form transition probabilities and the
//!   trajectory-based intensity curve.
//! - [`analysis`]: spectra, peak splitting, damping-envelope and
//!   nonlinear model fits.
//! - [`config`] / [`run`]: scenario files, execution, sweeps, artifact
//!   emission (backs the `photodissim` binary).
//!
//! ```
//! use photodissim::params::{DissipationParams, HamiltonianParams};
//! use photodissim::probability::{prob_dissipative, prob_from_trajectory};
//! use photodissim::solvers::{evolve, EvolutionSpec, SolverKind};
//! use photodissim::state::{vectorize, DensityMatrix, PolarizerAngles};
//!
//! let spec = EvolutionSpec::new(
//!     HamiltonianParams::new(1.0, 0.0, 1.0, 0.01),
//!     DissipationParams::isotropic(0.05),
//!     vectorize(&DensityMatrix::left()),
//!     50.0,
//!     SolverKind::ExactDissipative,
//! );
//! let trajectory = evolve(&spec)?;
//! let series = prob_from_trajectory(&trajectory, PolarizerAngles::linear(0.3))?;
//! let closed_form = prob_dissipative(1.0, 0.05, 0.01, 0.3, 50.0)?;
//! let simulated = *series.values().last().unwrap();
//! assert!((closed_form - simulated).abs() < 1e-9);
//! # Ok::<(), photodissim::Error>(())
//! ```

pub mod analysis;
pub mod config;
pub mod error;
pub mod generators;
pub mod linalg;
pub mod params;
pub mod probability;
pub mod run;
pub mod solvers;
pub mod state;

pub use error::{Error, Result};
pub use linalg::{Mat2, Mat4, C64};
pub use params::{
    validate_cp, DissipationCombos, DissipationParams, HamiltonianParams, ValidationReport,
};
pub use state::{
    devectorize, expectation, projector, purity, vectorize, DensityMatrix, Observable,
    PolarizerAngles, StateVector4,
};
