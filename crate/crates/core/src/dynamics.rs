//! Reduced dynamics of the emitter under a single-photon exponential packet.
//!
//! The excited-state amplitude has a closed form: writing gamma for the
//! waveguide decay rate, delta for the packet linewidth and delta_l for the
//! carrier detuning, the amplitude in the frame rotating at the transition
//! frequency is
//!
//! ```text
//! psi(t) = -sqrt(gamma * delta / 2) * exp(-gamma t / 2) * (exp(x t) - 1) / x,
//! x = (gamma - delta) / 2 - i delta_l,
//! ```
//!
//! scaled by sqrt(1 - c0^2) when the emitter starts in a superposition with
//! ground-state weight c0^2. Everything else in the crate derives from this
//! amplitude and its derivative: the instantaneous decay rate
//! `-2 Re(psi'/psi)`, the instantaneous frequency shift `-2 Im(psi'/psi)`
//! (reported in the lab frame as `2 nu_s + shift_rel`), and the
//! emitted-field values along the waveguide.
//!
//! Near x = 0 the ratio `(exp(x t) - 1)/x` is evaluated by a short Taylor
//! series; elsewhere through a complex `exp_m1`, so both branches stay
//! accurate to machine precision and the switch is seamless.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::params::{PacketParams, SystemParams};
use crate::scalar::RealScalar;

/// Threshold on |x|·t below which the Taylor branch is used.
const TAYLOR_SWITCH: f64 = 1e-6;

/// Amplitudes smaller than this are treated as vanishing when dividing.
const SINGULAR_FLOOR: f64 = 1e-14;

/// `exp(z) - 1` without cancellation for small `z`.
fn exp_m1_c<T: RealScalar>(z: Complex<T>) -> Complex<T> {
    let half = T::of(0.5);
    let sin_half = (z.im * half).sin();
    Complex::new(
        z.re.exp_m1() * z.im.cos() - (sin_half * sin_half) * T::of(2.0),
        z.re.exp() * z.im.sin(),
    )
}

/// One evaluated point of the reduced dynamics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeSample<T: RealScalar> {
    pub t: T,
    /// Excited-state amplitude in the rotating frame, including the
    /// sqrt(1 - c0^2) superposition weight.
    pub psi: Complex<T>,
    /// Its analytic time derivative.
    pub psi_dot: Complex<T>,
    /// Excited-state population |psi|^2.
    pub population: T,
}

/// Drive (incoming packet) and self-decay contributions to psi': the
/// derivative splits as `psi' = a1 + a2` with `a1 = -(gamma/2) psi` and
/// `a2` proportional to the packet envelope at the emitter. Their
/// interference `cross = 2 Re(a1* a2)` controls where the population grows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterferenceTerms<T: RealScalar> {
    pub a1: Complex<T>,
    pub a2: Complex<T>,
    pub cross: T,
}

/// Closed-form reduced dynamics for one (system, packet) pair.
///
/// Construction validates nothing beyond what the parameter types already
/// guarantee; it just precomputes the constants that appear in every
/// evaluation.
#[derive(Debug, Clone, Copy)]
pub struct PulseDynamics<T: RealScalar> {
    sys: SystemParams<T>,
    pkt: PacketParams<T>,
    /// (gamma - delta)/2 - i delta_l.
    x: Complex<T>,
    /// sqrt(gamma delta / 2) * sqrt(1 - c0^2), the scale of both psi and
    /// the drive term.
    prefactor: T,
}

impl<T: RealScalar> PulseDynamics<T> {
    pub fn new(sys: SystemParams<T>, pkt: PacketParams<T>) -> Self {
        let half = T::of(0.5);
        let x = Complex::new((sys.gamma_1d() - pkt.delta()) * half, -pkt.detuning());
        let prefactor =
            (sys.gamma_1d() * pkt.delta() * half).sqrt() * pkt.excitation_weight().sqrt();
        Self {
            sys,
            pkt,
            x,
            prefactor,
        }
    }

    pub fn system(&self) -> &SystemParams<T> {
        &self.sys
    }

    pub fn packet(&self) -> &PacketParams<T> {
        &self.pkt
    }

    fn check_time(&self, t: T) -> Result<()> {
        if !t.is_finite() || t < T::zero() {
            return Err(Error::InvalidTime {
                t: t.as_f64(),
                reason: "dynamics are defined for finite t >= 0",
            });
        }
        Ok(())
    }

    /// Packet envelope factor exp((-delta/2 - i delta_l) t) at the emitter.
    pub(crate) fn drive(&self, t: T) -> Complex<T> {
        Complex::new(-self.pkt.delta() * T::of(0.5), -self.pkt.detuning())
            .scale(t)
            .exp()
    }

    /// (exp(x t) - 1) / x, with the Taylor branch near x t = 0.
    fn growth(&self, t: T) -> Complex<T> {
        let z = self.x.scale(t);
        if z.norm_sqr().sqrt() < T::of(TAYLOR_SWITCH) {
            let half = T::of(0.5);
            let sixth = T::of(1.0 / 6.0);
            let twenty_fourth = T::of(1.0 / 24.0);
            (Complex::new(T::one(), T::zero())
                + z.scale(half)
                + (z * z).scale(sixth)
                + (z * z * z).scale(twenty_fourth))
            .scale(t)
        } else {
            exp_m1_c(z) / self.x
        }
    }

    /// Excited-state amplitude in the rotating frame (zero at t = 0).
    pub fn amplitude(&self, t: T) -> Result<Complex<T>> {
        self.check_time(t)?;
        let decay = (-self.sys.gamma_1d() * T::of(0.5) * t).exp();
        // exp(x t) overflows for linewidths below gamma_1d at extreme
        // times even though the amplitude itself is tiny; there the two
        // exponentials are far apart and the difference form is safe.
        if self.x.re * t > T::of(700.0) {
            let diff = self.drive(t) - Complex::new(decay, T::zero());
            return Ok(diff / self.x * (-self.prefactor));
        }
        Ok(self.growth(t).scale(-self.prefactor * decay))
    }

    /// Analytic derivative of [`Self::amplitude`]; evaluated through the
    /// equation of motion, which is exact and avoids cancellation.
    pub fn amplitude_dot(&self, t: T) -> Result<Complex<T>> {
        let i = self.interference(t)?;
        Ok(i.a1 + i.a2)
    }

    /// Excited-state population |psi(t)|^2.
    pub fn population(&self, t: T) -> Result<T> {
        Ok(self.amplitude(t)?.norm_sqr())
    }

    /// Self-decay and drive parts of psi', plus their interference.
    pub fn interference(&self, t: T) -> Result<InterferenceTerms<T>> {
        let psi = self.amplitude(t)?;
        let a1 = psi.scale(-self.sys.gamma_1d() * T::of(0.5));
        let a2 = self.drive(t).scale(-self.prefactor);
        let cross = (a1.conj() * a2).re * T::of(2.0);
        Ok(InterferenceTerms { a1, a2, cross })
    }

    /// Time derivative of the population, 2 Re(psi* psi').
    pub fn population_dot(&self, t: T) -> Result<T> {
        let psi = self.amplitude(t)?;
        let dot = self.amplitude_dot(t)?;
        Ok((dot * psi.conj()).re * T::of(2.0))
    }

    fn rate_parts(&self, t: T) -> Result<(Complex<T>, T)> {
        let psi = self.amplitude(t)?;
        let norm_sqr = psi.norm_sqr();
        if norm_sqr.sqrt() < T::of(SINGULAR_FLOOR) {
            return Err(Error::SingularAmplitude {
                t: t.as_f64(),
                magnitude: norm_sqr.sqrt().as_f64(),
            });
        }
        let dot = self.amplitude_dot(t)?;
        Ok((dot * psi.conj(), norm_sqr))
    }

    /// Instantaneous decay rate `-2 Re(psi'/psi)`; negative exactly where
    /// the population grows. Errors where |psi| is below 1e-14, since the
    /// rate is undefined at population zeros.
    pub fn decay_rate(&self, t: T) -> Result<T> {
        let (num, den) = self.rate_parts(t)?;
        Ok(-T::of(2.0) * num.re / den)
    }

    /// Instantaneous frequency shift in the lab frame,
    /// `2 nu_s - 2 Im(psi'/psi)` with psi in the rotating frame.
    pub fn lamb_shift(&self, t: T) -> Result<T> {
        Ok(T::of(2.0) * self.sys.nu_s() + self.lamb_shift_rel(t)?)
    }

    /// Frequency shift relative to the bare transition (frame-independent
    /// part), `-2 Im(psi'/psi)`.
    pub fn lamb_shift_rel(&self, t: T) -> Result<T> {
        let (num, den) = self.rate_parts(t)?;
        Ok(-T::of(2.0) * num.im / den)
    }

    /// Amplitude, derivative, and population at one time.
    pub fn sample(&self, t: T) -> Result<AmplitudeSample<T>> {
        let psi = self.amplitude(t)?;
        let psi_dot = self.amplitude_dot(t)?;
        Ok(AmplitudeSample {
            t,
            psi,
            psi_dot,
            population: psi.norm_sqr(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn dynamics(delta: f64, detuning: f64, c0: f64) -> PulseDynamics<f64> {
        PulseDynamics::new(
            SystemParams::default(),
            PacketParams::new(delta, detuning, c0).unwrap(),
        )
    }

    #[test]
    fn amplitude_starts_at_zero_exactly() {
        for (delta, detuning, c0) in [(0.1, 0.0, 0.0), (1.0, 10.0, 0.5), (10.0, -2.0, 0.9)] {
            let d = dynamics(delta, detuning, c0);
            assert_eq!(d.amplitude(0.0).unwrap(), Complex::new(0.0, 0.0));
            assert_eq!(d.population(0.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn matched_linewidth_amplitude_is_the_known_closed_form() {
        // delta = gamma, resonant: psi = -t/sqrt(2) e^{-t/2}, so the
        // population is t^2 e^{-t} / 2 and peaks at t = 2 with 2 e^{-2}.
        let d = dynamics(1.0, 0.0, 0.0);
        let t = 2.0;
        let psi = d.amplitude(t).unwrap();
        assert_abs_diff_eq!(psi.im, 0.0);
        assert_relative_eq!(psi.re, -2.0 / 2f64.sqrt() * (-1f64).exp(), epsilon = 1e-15);
        assert_relative_eq!(
            d.population(t).unwrap(),
            2.0 * (-2f64).exp(),
            epsilon = 1e-14
        );
        // The derivative vanishes at the peak.
        assert_abs_diff_eq!(d.amplitude_dot(t).unwrap().norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn initial_slope_is_the_drive_amplitude() {
        for c0 in [0.0, 0.5, 0.9] {
            let d = dynamics(0.4, 3.0, c0);
            let dot = d.amplitude_dot(0.0).unwrap();
            let expect = -(1.0 * 0.4 / 2.0f64).sqrt() * (1.0 - c0 * c0).sqrt();
            assert_relative_eq!(dot.re, expect, epsilon = 1e-15);
            assert_abs_diff_eq!(dot.im, 0.0);
        }
    }

    #[test]
    fn derivative_matches_central_differences() {
        let d = dynamics(0.1, 2.0, 0.0);
        let h = 1e-5;
        for &t in &[0.3, 1.0, 2.5, 6.0] {
            let fd = (d.amplitude(t + h).unwrap() - d.amplitude(t - h).unwrap()) / (2.0 * h);
            let an = d.amplitude_dot(t).unwrap();
            assert!((fd - an).norm() < 1e-8, "t = {t}: fd = {fd}, an = {an}");
        }
    }

    #[test]
    fn finite_difference_error_is_second_order() {
        let d = dynamics(0.5, 5.0, 0.0);
        let t = 1.3;
        let an = d.amplitude_dot(t).unwrap();
        let err = |h: f64| {
            ((d.amplitude(t + h).unwrap() - d.amplitude(t - h).unwrap()) / (2.0 * h) - an).norm()
        };
        let ratio = err(2e-3) / err(1e-3);
        assert!((3.5..4.5).contains(&ratio), "ratio = {ratio}");
    }

    #[test]
    fn matched_linewidth_decay_rate_is_one_minus_two_over_t() {
        let d = dynamics(1.0, 0.0, 0.0);
        for &t in &[0.1, 0.5, 1.0, 2.0, 4.0, 7.5] {
            assert_abs_diff_eq!(d.decay_rate(t).unwrap(), 1.0 - 2.0 / t, epsilon = 1e-12);
        }
        // Strongly negative rate during the initial rise.
        assert!(d.decay_rate(1e-6).unwrap() < -1.9e6);
    }

    #[test]
    fn late_time_decay_rate_approaches_the_slower_of_the_two_scales() {
        // Long packet: the emitter ends up slaved to the exponential tail
        // of the drive, so the population decays at the packet rate.
        let slow = dynamics(0.1, 0.0, 0.0);
        assert_abs_diff_eq!(slow.decay_rate(50.0).unwrap(), 0.1, epsilon = 1e-8);
        // Short packet: after the packet has gone the emitter decays at
        // its own waveguide rate.
        let fast = dynamics(10.0, 0.0, 0.0);
        assert_abs_diff_eq!(fast.decay_rate(10.0).unwrap(), 1.0, epsilon = 1e-8);
    }

    #[test]
    fn resonant_dynamics_have_no_frequency_shift() {
        let d = PulseDynamics::new(
            SystemParams::new(1.0, 5.0).unwrap(),
            PacketParams::new(0.4, 0.0, 0.0).unwrap(),
        );
        for &t in &[0.2, 1.0, 3.0] {
            assert_abs_diff_eq!(d.lamb_shift_rel(t).unwrap(), 0.0);
            assert_abs_diff_eq!(d.lamb_shift(t).unwrap(), 10.0);
        }
    }

    #[test]
    fn frequency_shift_matches_phase_derivative() {
        let d = dynamics(0.1, 10.0, 0.0);
        let t = 1.0;
        let h = 1e-6;
        let arg = |t: f64| d.amplitude(t).unwrap().arg();
        let mut dphi = arg(t + h) - arg(t - h);
        if dphi > std::f64::consts::PI {
            dphi -= 2.0 * std::f64::consts::PI;
        } else if dphi < -std::f64::consts::PI {
            dphi += 2.0 * std::f64::consts::PI;
        }
        let fd = -2.0 * dphi / (2.0 * h);
        assert_abs_diff_eq!(d.lamb_shift_rel(t).unwrap(), fd, epsilon = 1e-6);
    }

    #[test]
    fn rates_are_invariant_under_the_initial_superposition() {
        let base = dynamics(0.3, 4.0, 0.0);
        for c0 in [0.5, 0.9] {
            let mixed = dynamics(0.3, 4.0, c0);
            for &t in &[0.37, 1.1, 2.9, 5.3] {
                assert_relative_eq!(
                    base.decay_rate(t).unwrap(),
                    mixed.decay_rate(t).unwrap(),
                    max_relative = 1e-12
                );
                assert_relative_eq!(
                    base.lamb_shift_rel(t).unwrap(),
                    mixed.lamb_shift_rel(t).unwrap(),
                    max_relative = 1e-12,
                    epsilon = 1e-13
                );
            }
        }
    }

    #[test]
    fn monochromatic_resonant_population_respects_the_weak_drive_bound() {
        let d = dynamics(1e-3, 0.0, 0.0);
        let bound = 2.0 * 1e-3;
        let mut max = 0.0f64;
        let mut t = 0.0;
        while t <= 50.0 {
            max = max.max(d.population(t).unwrap());
            t += 0.01;
        }
        assert!(max <= bound, "max population {max} exceeds {bound}");
        assert!(max > 0.9 * bound, "max population {max} far below {bound}");
    }

    #[test]
    fn taylor_branch_joins_the_direct_branch_seamlessly() {
        // |x| = 1e-6 via a tiny linewidth mismatch, and via pure detuning,
        // so |x| t crosses the branch switch at t = 1. Both branches must
        // match a high-order series for (e^z - 1)/x that is exact to well
        // below rounding at these magnitudes.
        for (delta, detuning) in [(1.0 - 2e-6, 0.0), (1.0, 1e-6)] {
            let d = dynamics(delta, detuning, 0.0);
            for t in [0.5, 0.9, 0.999999, 1.000001, 1.1, 2.0] {
                let z = d.x.scale(t);
                let mut reference = Complex::new(0.0f64, 0.0);
                let mut term = Complex::new(1.0f64, 0.0);
                for k in 1..=7 {
                    reference += term;
                    term = term * z.scale(1.0 / (k as f64 + 1.0));
                }
                reference = reference.scale(t);
                let got = d.growth(t);
                assert!(
                    (got - reference).norm() <= 1e-13 * reference.norm(),
                    "t = {t}: got {:?}, want {:?}",
                    got,
                    reference
                );
            }
        }
    }

    #[test]
    fn interference_identity_is_exact() {
        let d = dynamics(0.1, 10.0, 0.3);
        let gamma = 1.0;
        let mut t = 0.05;
        while t < 8.0 {
            let terms = d.interference(t).unwrap();
            // d|a1|^2/dt = (gamma/2)^2 d|psi|^2/dt, evaluated analytically.
            let lhs = (gamma / 2.0) * (gamma / 2.0) * d.population_dot(t).unwrap();
            let rhs = -(gamma / 2.0) * (2.0 * terms.a1.norm_sqr() + terms.cross);
            assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-12);
            t += 0.05;
        }
    }

    #[test]
    fn interference_sign_changes_are_spaced_by_the_detuning_period() {
        let d = dynamics(0.1, 10.0, 0.0);
        let mut crossings = Vec::new();
        let mut prev: Option<(f64, f64)> = None;
        // Early on the crossings sit near the roots of a pure cosine in t;
        // past a couple of lifetimes the decaying envelope drags them apart.
        let mut t = 0.01;
        while t < 2.0 {
            let c = d.interference(t).unwrap().cross;
            if let Some((tp, cp)) = prev {
                if cp.signum() != c.signum() {
                    crossings.push(0.5 * (tp + t));
                }
            }
            prev = Some((t, c));
            t += 1e-3;
        }
        assert!(crossings.len() > 4);
        let half_period = std::f64::consts::PI / 10.0;
        for w in crossings.windows(2) {
            let gap = w[1] - w[0];
            assert!(
                (gap - half_period).abs() < 0.1 * half_period,
                "gap {gap} vs half period {half_period}"
            );
        }
    }

    #[test]
    fn singular_points_are_reported_not_nan() {
        // Matched linewidth with detuning: the population has exact zeros
        // at multiples of 2 pi / detuning.
        let d = dynamics(1.0, 10.0, 0.0);
        let t_zero = 2.0 * std::f64::consts::PI / 10.0;
        match d.decay_rate(t_zero) {
            Err(Error::SingularAmplitude { .. }) => {}
            other => panic!("expected singular amplitude, got {other:?}"),
        }
    }

    #[test]
    fn negative_and_non_finite_times_are_rejected() {
        let d = dynamics(0.1, 0.0, 0.0);
        assert!(d.amplitude(-1.0).is_err());
        assert!(d.amplitude(f64::NAN).is_err());
        assert!(d.amplitude(f64::INFINITY).is_err());
    }

    #[test]
    fn decoupled_emitter_never_excites() {
        let d = PulseDynamics::new(
            SystemParams::new(0.0, 0.0).unwrap(),
            PacketParams::new(0.5, 1.0, 0.0).unwrap(),
        );
        assert_eq!(d.amplitude(3.0).unwrap(), Complex::new(0.0, 0.0));
        assert!(d.decay_rate(3.0).is_err());
    }

    #[test]
    fn works_in_single_precision() {
        let d = PulseDynamics::new(
            SystemParams::<f32>::default(),
            PacketParams::new(1.0f32, 0.0, 0.0).unwrap(),
        );
        let pop = d.population(2.0).unwrap();
        assert!((pop - 2.0 * (-2.0f32).exp()).abs() < 1e-6);
    }

    #[test]
    fn stays_finite_far_beyond_the_packet() {
        // Narrow packets decay much more slowly than the emitter; at
        // extreme times the amplitude follows the drive envelope alone.
        let d = dynamics(0.1, 0.0, 0.0);
        let psi = d.amplitude(2000.0).unwrap();
        let expect = (0.05f64).sqrt() * (-100.0f64).exp() / 0.45;
        assert!(psi.re.is_finite() && psi.im.is_finite());
        assert_abs_diff_eq!(psi.re, -expect, epsilon = 1e-10 * expect);
        assert_eq!(psi.im, 0.0);
    }
}
