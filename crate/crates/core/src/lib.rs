//! Single-photon pulses on a two-level emitter in a one-dimensional
//! waveguide.
//!
//! The crate models one emitter coupled to a bidirectional continuum and
//! driven by an exponential single-photon wave packet. Because the problem
//! stays in the zero- and one-excitation sectors, the reduced dynamics has
//! a closed form; on top of it the crate provides
//!
//! * [`dynamics`]: excited-state amplitude, instantaneous decay rate and
//!   frequency shift, and the drive/decay interference decomposition;
//! * [`nm`]: population extrema and the integral of the negative part of
//!   the decay rate (a non-Markovianity measure), plus parameter sweeps;
//! * [`field`]: the forward/backward field amplitudes along the guide,
//!   channel probabilities, and detector-ratio reconstruction of the rates;
//! * [`oracle`]: independent cross-checks (a brute-force discretized-bath
//!   integrator, a time-local master-equation integrator, and
//!   finite-difference rate estimates).
//!
//! Everything is generic over the floating-point type through
//! [`scalar::RealScalar`]; the aliases at the crate root fix `f64`, which
//! is what the command-line tool and the acceptance suite use.
//!
//! Units: hbar = 1, group velocity c = 1, and the waveguide decay rate is
//! the natural frequency scale (1 in all defaults).

pub mod dynamics;
pub mod error;
pub mod field;
pub mod nm;
pub mod oracle;
pub mod params;
pub mod quad;
pub mod scalar;

pub use error::{Error, Result};

/// Complex double-precision scalar.
pub type C64 = num_complex::Complex<f64>;

/// `f64` specializations of the main types.
pub type SystemParams64 = params::SystemParams<f64>;
pub type PacketParams64 = params::PacketParams<f64>;
pub type PulseDynamics64 = dynamics::PulseDynamics<f64>;
pub type FieldSolution64 = field::FieldSolution<f64>;
pub type NmReport64 = nm::NmReport<f64>;
pub type ModeDiscretization64 = oracle::ModeDiscretization<f64>;
