//! Error type shared across the crate.

use thiserror::Error;

/// Everything that can go wrong when setting up or running a simulation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A physical or numerical parameter failed validation.
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// Time argument outside the domain of the dynamics (t >= 0).
    #[error("time argument t = {t} is outside the valid domain: {reason}")]
    InvalidTime { t: f64, reason: &'static str },

    /// Rate quantities are undefined where the excited-state amplitude
    /// vanishes; |psi| fell below the 1e-14 floor.
    #[error("excited-state amplitude singular at t = {t} (|psi| = {magnitude:.3e} < 1e-14); decay rate and frequency shift are undefined here")]
    SingularAmplitude { t: f64, magnitude: f64 },

    /// Position argument where the field has a Heaviside discontinuity.
    #[error("field amplitude is discontinuous at r = {r}; sample on a half-step-offset grid instead")]
    AmbiguousPosition { r: f64 },

    /// Spatial window too narrow to contain the excitation at time t.
    #[error("spatial window half-width {got} too small at t = {t}; need more than {needed} to contain the packet")]
    WindowTooSmall { got: f64, needed: f64, t: f64 },

    /// A grid or interval argument is malformed.
    #[error("invalid grid: {reason}")]
    InvalidGrid { reason: String },

    /// The lower cutoff of the measure integral swallowed the initial rise.
    #[error("cutoff t0 = {t0} is not below the first population maximum at t = {first_max}")]
    CutoffBeyondFirstRise { t0: f64, first_max: f64 },

    /// The measure integral diverges: the population passes through an
    /// interior zero, so the negative-rate integral has no finite value.
    #[error("non-Markovianity measure diverges: population minimum at t = {t} is numerically zero (value {population:.3e})")]
    DivergentMeasure { t: f64, population: f64 },

    /// Adaptive quadrature failed to reach the requested tolerance.
    #[error("adaptive quadrature did not converge on [{a}, {b}] (requested tolerance {tolerance:.3e})")]
    QuadratureFailure { a: f64, b: f64, tolerance: f64 },

    /// Root bracketing failed where a sign change was expected.
    #[error("root refinement failed on [{a}, {b}]: {reason}")]
    RootFindingFailure { a: f64, b: f64, reason: &'static str },

    /// Requested evolution time reaches the discrete bath's recurrence.
    #[error("t_max = {t_max} reaches the discrete-bath recurrence horizon {horizon}; increase the mode count")]
    RecurrenceHorizon { t_max: f64, horizon: f64 },

    /// Integrator step too large for the requested bandwidth.
    #[error("step dt = {dt} exceeds the stability bound {bound} for band half-width {band}")]
    UnstableStep { dt: f64, bound: f64, band: f64 },

    /// Trace or positivity of the reduced density matrix was lost.
    #[error("reduced state lost {what} at t = {t} (deviation {deviation:.3e}); reduce the step size")]
    StateMonitor {
        what: &'static str,
        t: f64,
        deviation: f64,
    },

    /// Finite-difference stencil touches a population zero.
    #[error("finite-difference stencil at t = {t} (h = {h}) touches a vanishing population")]
    StencilAtZero { t: f64, h: f64 },
}

pub type Result<V> = std::result::Result<V, Error>;
