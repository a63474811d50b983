//! Validated parameter sets for the emitter and the incident packet.
//!
//! Units: hbar = 1 and the group velocity c = 1 throughout, so times and
//! inverse frequencies share one unit and positions are measured in units
//! of c over the decay rate. Frequencies are angular. The waveguide decay
//! rate `gamma_1d` sets the reference scale (1 by default) and the mode
//! density is fixed at 1/(2 pi), which makes spatial norm equal to
//! probability with no extra factors.

use crate::error::{Error, Result};
use crate::scalar::RealScalar;

/// Emitter and waveguide constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams<T: RealScalar> {
    gamma_1d: T,
    nu_s: T,
}

impl<T: RealScalar> SystemParams<T> {
    /// `gamma_1d` is the waveguide-induced decay rate (may be 0 to decouple
    /// the emitter for free-propagation checks), `nu_s` the emitter
    /// transition frequency.
    pub fn new(gamma_1d: T, nu_s: T) -> Result<Self> {
        if !gamma_1d.is_finite() || gamma_1d < T::zero() {
            return Err(Error::InvalidParameter {
                name: "gamma_1d",
                value: gamma_1d.as_f64(),
                reason: "decay rate must be finite and >= 0",
            });
        }
        if !nu_s.is_finite() || nu_s < T::zero() {
            return Err(Error::InvalidParameter {
                name: "nu_s",
                value: nu_s.as_f64(),
                reason: "transition frequency must be finite and >= 0",
            });
        }
        Ok(Self { gamma_1d, nu_s })
    }

    pub fn gamma_1d(&self) -> T {
        self.gamma_1d
    }

    pub fn nu_s(&self) -> T {
        self.nu_s
    }
}

impl<T: RealScalar> Default for SystemParams<T> {
    /// Reference units: unit decay rate, frequencies measured from the
    /// transition (`nu_s` = 0).
    fn default() -> Self {
        Self {
            gamma_1d: T::one(),
            nu_s: T::zero(),
        }
    }
}

/// Incident single-photon packet: exponential envelope of linewidth
/// `delta`, carrier detuned by `detuning` from the emitter transition, and
/// a ground-state admixture `c0` in the initial superposition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PacketParams<T: RealScalar> {
    delta: T,
    detuning: T,
    c0: T,
}

impl<T: RealScalar> PacketParams<T> {
    pub fn new(delta: T, detuning: T, c0: T) -> Result<Self> {
        if !delta.is_finite() || delta <= T::zero() {
            return Err(Error::InvalidParameter {
                name: "delta",
                value: delta.as_f64(),
                reason: "packet linewidth must be finite and > 0",
            });
        }
        if !detuning.is_finite() {
            return Err(Error::InvalidParameter {
                name: "detuning",
                value: detuning.as_f64(),
                reason: "detuning must be finite",
            });
        }
        if !c0.is_finite() || c0 < T::zero() || c0 >= T::one() {
            return Err(Error::InvalidParameter {
                name: "c0",
                value: c0.as_f64(),
                reason: "ground-state amplitude must lie in [0, 1)",
            });
        }
        Ok(Self {
            delta,
            detuning,
            c0,
        })
    }

    /// Packet with no ground-state admixture (a bare single photon).
    pub fn photon(delta: T, detuning: T) -> Result<Self> {
        Self::new(delta, detuning, T::zero())
    }

    pub fn delta(&self) -> T {
        self.delta
    }

    /// Carrier detuning from the emitter transition (signed).
    pub fn detuning(&self) -> T {
        self.detuning
    }

    pub fn c0(&self) -> T {
        self.c0
    }

    /// Weight of the single-excitation sector, 1 - c0^2.
    pub fn excitation_weight(&self) -> T {
        (T::one() - self.c0 * self.c0).max(T::zero())
    }

    /// Carrier frequency in the lab frame.
    pub fn nu_l(&self, sys: &SystemParams<T>) -> T {
        sys.nu_s() + self.detuning
    }
}

/// Rotating-wave check: the model drops counter-rotating terms, which is
/// justified when every dynamical rate is small against the carrier.
/// Returns a human-readable warning when that separation does not hold.
/// `nu_s` = 0 is the abstract-units convention (frequencies measured
/// relative to an implicitly large carrier) and never warns.
pub fn rwa_warning<T: RealScalar>(sys: &SystemParams<T>, pkt: &PacketParams<T>) -> Option<String> {
    if sys.nu_s() == T::zero() {
        return None;
    }
    let scale = sys
        .gamma_1d()
        .max(pkt.delta())
        .max(pkt.detuning().abs());
    if scale > sys.nu_s() * T::of(0.1) {
        Some(format!(
            "rotating-wave approximation is questionable: max(gamma_1d, delta, |detuning|) = {} is not small against nu_s = {}",
            scale.as_f64(),
            sys.nu_s().as_f64()
        ))
    } else {
        None
    }
}
