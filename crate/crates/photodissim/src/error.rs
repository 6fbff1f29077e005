//! Error type shared by the physics and analysis layers.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A four-vector does not correspond to a physical density matrix.
    #[error("non-physical state: {0}")]
    NonPhysicalState(String),

    /// Expectation value of a hermitian observable came out complex.
    #[error("expectation value has imaginary part {imag:.3e} (limit {limit:.1e})")]
    NonRealExpectation { imag: f64, limit: f64 },

    /// Level splitting ω = (μ²+ν²)^{1/2} vanishes; the instantaneous
    /// eigenbasis is undefined.
    #[error("degenerate hamiltonian: level splitting is zero")]
    DegenerateHamiltonian,

    /// The eigenvector convention breaks down at μ = −ω (ν = 0, μ < 0).
    #[error("singular gauge: mu + omega is not positive")]
    SingularGauge,

    /// The requested propagation method needs vanishing dissipation.
    #[error("dissipation parameters must all be zero for this solver")]
    DissipationNotZero,

    /// Parameters fall outside the regime the method is valid in.
    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),

    /// A secular denominator of the first-order probability formula
    /// is too close to zero.
    #[error("resonant denominator {name} = {value:.3e}")]
    ResonantDenominator { name: &'static str, value: f64 },

    /// The integrator detected trace drift beyond the mid-run guard.
    #[error("integration step too large: trace drift {drift:.3e} at t = {t}")]
    StepTooLarge { drift: f64, t: f64 },

    /// Raw probability fell outside the tolerated band around [0, 1].
    #[error("probability {value:.6e} at sample {index} outside [-1e-6, 1+1e-6]")]
    ProbabilityOutOfRange { value: f64, index: usize },

    /// Series time grid is not uniformly spaced.
    #[error("time grid is not uniform (relative deviation {0:.3e})")]
    NonUniformGrid(f64),

    #[error("too few samples: {got} (need at least {need})")]
    TooFewSamples { got: usize, need: usize },

    #[error("spectrum has {got} peak(s); need at least {need}")]
    InsufficientPeaks { got: usize, need: usize },

    #[error("found {got} oscillation extrema; need at least {need}")]
    TooFewExtrema { got: usize, need: usize },

    /// Series data (constructor input or CSV document) is malformed.
    #[error("invalid series data: {0}")]
    InvalidSeries(String),

    /// Initial guess handed to the fitter violates its constraints.
    #[error("bad initial guess: {0}")]
    BadInitialGuess(String),
}

impl Error {
    /// Whether this error reports a physics-regime violation (as opposed to
    /// a numerical failure). Drives the CLI exit code.
    pub fn is_regime_error(&self) -> bool {
        matches!(
            self,
            Error::DegenerateHamiltonian
                | Error::SingularGauge
                | Error::DissipationNotZero
                | Error::UnsupportedRegime(_)
                | Error::ResonantDenominator { .. }
                | Error::BadInitialGuess(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
