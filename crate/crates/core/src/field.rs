//! Real-space field amplitudes in the two propagation channels.
//!
//! Channel a carries the incoming packet (moving toward +r) plus the
//! forward-emitted wave; channel b carries only the backward-emitted wave.
//! With the mode density fixed at 1/(2pi), the emitted prefactor is
//! sqrt(gamma_1d/2) and the spatial norm of the amplitudes is a
//! probability, so
//!
//! ```text
//! c0^2 + |psi(t)|^2 + int |phi_a|^2 dr + int |phi_b|^2 dr = 1
//! ```
//!
//! holds at all times on a window wide enough to contain the packet.
//! The emitter sits at r = 0 and both Heaviside fronts (r = 0 and the
//! light cone r = t) make the densities discontinuous, so the channel
//! integrals are done piecewise between those breakpoints with one-sided
//! limits; output grids are offset so r = 0 is never sampled.
//!
//! The forward/backward amplitude ratio at mirrored detector positions
//! reconstructs the decay rate and frequency shift of the reduced
//! dynamics at the retarded time, which is what a physical detector pair
//! far from the emitter would measure.

use num_complex::Complex;

use crate::dynamics::PulseDynamics;
use crate::error::{Error, Result};
use crate::params::{PacketParams, SystemParams};
use crate::quad::composite_simpson;
use crate::scalar::RealScalar;

/// Integrated channel weights at a fixed time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelProbabilities<T: RealScalar> {
    /// Forward-channel probability, incoming plus transmitted.
    pub p_a: T,
    /// Backward-channel (reflected) probability.
    pub p_b: T,
    /// Excited-state population.
    pub p_e: T,
    /// c0^2 + p_e + p_a + p_b; should be 1 up to quadrature error.
    pub norm: T,
}

/// Field amplitudes on a spatial grid at a fixed time.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSnapshot<T: RealScalar> {
    pub t: T,
    /// Strictly increasing positions; r = 0 is excluded by construction.
    pub grid: Vec<T>,
    pub phi_a: Vec<Complex<T>>,
    pub phi_b: Vec<Complex<T>>,
    pub probabilities: ChannelProbabilities<T>,
}

/// Decay rate and frequency shift reconstructed from the field ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoveredRates<T: RealScalar> {
    pub gamma: T,
    pub lamb_shift: T,
}

/// One detector reading; the rate reconstruction is absent before the
/// light cone reaches the detector and at zeros of the retarded
/// amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorSample<T: RealScalar> {
    pub t: T,
    pub intensity_a: T,
    pub intensity_b: T,
    pub gamma_recovered: Option<T>,
    pub s_recovered: Option<T>,
}

/// Mirrored detector pair at +r_d / -r_d read out over a list of times.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectorTrace<T: RealScalar> {
    pub r_d: T,
    pub samples: Vec<DetectorSample<T>>,
}

/// Field solution driven by one closed-form emitter history.
#[derive(Debug, Clone, Copy)]
pub struct FieldSolution<T: RealScalar> {
    dynamics: PulseDynamics<T>,
}

impl<T: RealScalar> FieldSolution<T> {
    pub fn new(dynamics: PulseDynamics<T>) -> Self {
        Self { dynamics }
    }

    pub fn from_params(sys: SystemParams<T>, pkt: PacketParams<T>) -> Self {
        Self::new(PulseDynamics::new(sys, pkt))
    }

    pub fn dynamics(&self) -> &PulseDynamics<T> {
        &self.dynamics
    }

    fn check_position(&self, r: T, t: T) -> Result<()> {
        if !t.is_finite() || t < T::zero() {
            return Err(Error::InvalidTime {
                t: t.as_f64(),
                reason: "fields are defined for finite t >= 0",
            });
        }
        if !r.is_finite() {
            return Err(Error::AmbiguousPosition { r: r.as_f64() });
        }
        if r == T::zero() {
            return Err(Error::AmbiguousPosition { r: r.as_f64() });
        }
        Ok(())
    }

    /// exp(-i nu_s s), the lab-frame rotation of an amplitude emitted a
    /// time s ago.
    fn lab_phase(&self, s: T) -> Complex<T> {
        let angle = -self.dynamics.system().nu_s() * s;
        Complex::new(angle.cos(), angle.sin())
    }

    /// Free packet amplitude a retarded time s = t - r after its front
    /// passed the emitter (s > 0 inside the support).
    fn free_envelope(&self, s: T) -> Complex<T> {
        let pkt = self.dynamics.packet();
        let scale = pkt.excitation_weight().sqrt() * pkt.delta().sqrt();
        self.dynamics.drive(s) * self.lab_phase(s) * scale
    }

    /// Emitted amplitude a retarded time s after leaving the emitter.
    fn emitted(&self, s: T) -> Result<Complex<T>> {
        let scale = (self.dynamics.system().gamma_1d() * T::of(0.5)).sqrt();
        Ok(self.dynamics.amplitude(s)? * self.lab_phase(s) * scale)
    }

    /// Incoming packet alone, freely propagating toward +r.
    pub fn incoming(&self, r: T, t: T) -> Result<Complex<T>> {
        self.check_position(r, t)?;
        if r >= t {
            return Ok(Complex::new(T::zero(), T::zero()));
        }
        Ok(self.free_envelope(t - r))
    }

    /// Forward-channel amplitude.
    pub fn channel_a(&self, r: T, t: T) -> Result<Complex<T>> {
        self.check_position(r, t)?;
        if r >= t {
            return Ok(Complex::new(T::zero(), T::zero()));
        }
        let mut phi = self.free_envelope(t - r);
        if r > T::zero() {
            phi = phi + self.emitted(t - r)?;
        }
        Ok(phi)
    }

    /// Backward-channel amplitude; identically zero for r > 0.
    pub fn channel_b(&self, r: T, t: T) -> Result<Complex<T>> {
        self.check_position(r, t)?;
        if r > T::zero() || t + r <= T::zero() {
            return Ok(Complex::new(T::zero(), T::zero()));
        }
        self.emitted(t + r)
    }

    /// Widest spatial step that still resolves the packet envelope, the
    /// emission tail, and the channel-a beat at the detuning frequency.
    pub fn default_grid_step(&self) -> T {
        let fastest = self
            .dynamics
            .packet()
            .delta()
            .max(self.dynamics.system().gamma_1d())
            .max(self.dynamics.packet().detuning().abs());
        T::of(0.05).min(T::of(0.08) / fastest)
    }

    /// Half-width that keeps the untruncated tail of the incoming packet
    /// below the norm tolerance.
    pub fn default_grid_halfwidth(&self, t: T) -> T {
        t + T::of(20.0) / self.dynamics.packet().delta()
    }

    fn check_grid(&self, t: T, halfwidth: T, step: T) -> Result<()> {
        let needed = t + T::of(10.0) / self.dynamics.packet().delta();
        if !(halfwidth > needed) {
            return Err(Error::WindowTooSmall {
                got: halfwidth.as_f64(),
                needed: needed.as_f64(),
                t: t.as_f64(),
            });
        }
        let fastest = self
            .dynamics
            .packet()
            .delta()
            .max(self.dynamics.system().gamma_1d())
            .max(self.dynamics.packet().detuning().abs());
        let bound = T::of(0.05).min(T::of(0.1) / fastest);
        if !(step > T::zero()) || step > bound {
            return Err(Error::InvalidGrid {
                reason: format!(
                    "spatial step {} exceeds the resolution bound {}",
                    step.as_f64(),
                    bound.as_f64()
                ),
            });
        }
        Ok(())
    }

    /// |phi_a|^2 on the interference region 0 < r < t, continued to the
    /// closed interval by its one-sided limits.
    fn density_a_mid(&self, r: T, t: T) -> T {
        let s = t - r;
        let phi = self.free_envelope(s)
            + self
                .emitted(s)
                .unwrap_or_else(|_| Complex::new(T::zero(), T::zero()));
        phi.norm_sqr()
    }

    /// Transmitted probability: the forward-channel weight beyond the
    /// emitter, integrating |phi_a|^2 over 0 < r < t.
    pub fn transmitted_probability(&self, t: T, step: Option<T>) -> Result<T> {
        if !t.is_finite() || t < T::zero() {
            return Err(Error::InvalidTime {
                t: t.as_f64(),
                reason: "fields are defined for finite t >= 0",
            });
        }
        if t == T::zero() {
            return Ok(T::zero());
        }
        let h = step.unwrap_or_else(|| self.default_grid_step());
        Ok(composite_simpson(
            |r| self.density_a_mid(r, t),
            T::zero(),
            t,
            h,
            8,
        ))
    }

    /// Channel weights by piecewise composite Simpson between the density
    /// breakpoints -t, 0 and t. The window must extend `10/delta` past
    /// the light cone so the truncated incoming tail stays below the norm
    /// tolerance.
    pub fn channel_probabilities(
        &self,
        t: T,
        grid_halfwidth: T,
        grid_step: T,
    ) -> Result<ChannelProbabilities<T>> {
        self.check_grid(t, grid_halfwidth, grid_step)?;
        let l = grid_halfwidth;
        let h = grid_step;

        // Incoming side r < 0: free envelope only, no oscillation.
        let left = composite_simpson(
            |r| self.free_envelope(t - r).norm_sqr(),
            -l,
            T::zero(),
            h,
            8,
        );
        let mid = if t > T::zero() {
            composite_simpson(|r| self.density_a_mid(r, t), T::zero(), t, h, 8)
        } else {
            T::zero()
        };
        let p_a = left + mid;

        let p_b = if t > T::zero() {
            let scale = self.dynamics.system().gamma_1d() * T::of(0.5);
            composite_simpson(
                |r| {
                    self.dynamics
                        .population(t + r)
                        .map(|p| p * scale)
                        .unwrap_or(T::zero())
                },
                -t.min(l),
                T::zero(),
                h,
                8,
            )
        } else {
            T::zero()
        };

        let p_e = self.dynamics.population(t)?;
        let c0 = self.dynamics.packet().c0();
        Ok(ChannelProbabilities {
            p_a,
            p_b,
            p_e,
            norm: c0 * c0 + p_e + p_a + p_b,
        })
    }

    /// Amplitudes on a half-step-offset grid of even length plus the
    /// channel weights. `step` controls the output grid; the integrals
    /// use the finer of `step` and the resolution bound.
    pub fn snapshot(&self, t: T, grid_halfwidth: T, step: T) -> Result<FieldSnapshot<T>> {
        if !(step > T::zero()) || !step.is_finite() {
            return Err(Error::InvalidGrid {
                reason: format!("snapshot step must be positive, got {}", step.as_f64()),
            });
        }
        let quad_step = step.min(self.default_grid_step());
        let probabilities = self.channel_probabilities(t, grid_halfwidth, quad_step)?;

        let m = (grid_halfwidth / step).round().as_f64() as usize;
        let m = m.max(1);
        let h = grid_halfwidth / T::of(m as f64);
        let n = 2 * m;
        let mut grid = Vec::with_capacity(n);
        let mut phi_a = Vec::with_capacity(n);
        let mut phi_b = Vec::with_capacity(n);
        for k in 0..n {
            let r = -grid_halfwidth + h * (T::of(k as f64) + T::of(0.5));
            grid.push(r);
            phi_a.push(self.channel_a(r, t)?);
            phi_b.push(self.channel_b(r, t)?);
        }
        Ok(FieldSnapshot {
            t,
            grid,
            phi_a,
            phi_b,
            probabilities,
        })
    }

    /// Decay rate and frequency shift at the retarded time t - r_d, read
    /// off the ratio of the two channel amplitudes at mirrored detector
    /// positions.
    pub fn detector_ratio(&self, t: T, r_d: T) -> Result<RecoveredRates<T>> {
        if !(r_d > T::zero()) || !r_d.is_finite() {
            return Err(Error::AmbiguousPosition { r: r_d.as_f64() });
        }
        let tau = t - r_d;
        if !tau.is_finite() || tau <= T::zero() {
            return Err(Error::InvalidTime {
                t: t.as_f64(),
                reason: "detector ratio needs t > r_d (retarded time after the front)",
            });
        }
        let backward = self.channel_b(-r_d, t)?;
        let magnitude = backward.norm_sqr().sqrt();
        let floor = (self.dynamics.system().gamma_1d() * T::of(0.5)).sqrt() * T::of(1e-14);
        if magnitude <= floor {
            return Err(Error::SingularAmplitude {
                t: tau.as_f64(),
                magnitude: magnitude.as_f64(),
            });
        }
        let ratio = self.channel_a(r_d, t)? / backward;
        let gamma_1d = self.dynamics.system().gamma_1d();
        let nu_s = self.dynamics.system().nu_s();
        Ok(RecoveredRates {
            gamma: gamma_1d * ratio.re,
            lamb_shift: T::of(2.0) * nu_s + gamma_1d * ratio.im,
        })
    }

    /// Intensities at a mirrored detector pair and, where defined, the
    /// reconstructed rates, for each requested time.
    pub fn detector_trace(&self, r_d: T, times: &[T]) -> Result<DetectorTrace<T>> {
        if !(r_d > T::zero()) || !r_d.is_finite() {
            return Err(Error::AmbiguousPosition { r: r_d.as_f64() });
        }
        if times.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidGrid {
                reason: "detector times must be strictly increasing".to_string(),
            });
        }
        let samples = times
            .iter()
            .map(|&t| {
                let intensity_a = self.channel_a(r_d, t)?.norm_sqr();
                let intensity_b = self.channel_b(-r_d, t)?.norm_sqr();
                let rates = self.detector_ratio(t, r_d).ok();
                Ok(DetectorSample {
                    t,
                    intensity_a,
                    intensity_b,
                    gamma_recovered: rates.map(|r| r.gamma),
                    s_recovered: rates.map(|r| r.lamb_shift),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(DetectorTrace { r_d, samples })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn solution(delta: f64, detuning: f64) -> FieldSolution<f64> {
        FieldSolution::from_params(
            SystemParams::default(),
            PacketParams::photon(delta, detuning).unwrap(),
        )
    }

    fn zero(c: Complex<f64>) {
        assert_eq!(c, Complex::new(0.0, 0.0));
    }

    #[test]
    fn channel_a_vanishes_beyond_the_light_cone() {
        let f = solution(1.0, 0.0);
        zero(f.channel_a(5.0, 3.0).unwrap());
        zero(f.channel_a(3.0, 3.0).unwrap());
        assert!(f.channel_a(2.9, 3.0).unwrap().norm() > 0.0);
    }

    #[test]
    fn channel_b_is_empty_forward_and_before_arrival() {
        let f = solution(1.0, 0.0);
        zero(f.channel_b(1.0, 7.0).unwrap());
        zero(f.channel_b(-1.0, 0.5).unwrap());
        zero(f.channel_b(-1.0, 1.0).unwrap());
    }

    #[test]
    fn backward_spot_value_from_the_matched_closed_form() {
        // phi_b(-1, 3) = sqrt(1/2) psi(2): density e^-2.
        let f = solution(1.0, 0.0);
        let phi = f.channel_b(-1.0, 3.0).unwrap();
        assert_abs_diff_eq!(phi.norm_sqr(), (-2f64).exp(), epsilon = 1e-15);
        assert!(phi.re < 0.0, "emitted amplitude carries the pi phase");
    }

    #[test]
    fn positions_at_the_emitter_are_rejected() {
        let f = solution(1.0, 0.0);
        for res in [f.channel_a(0.0, 1.0), f.channel_b(0.0, 1.0)] {
            match res {
                Err(Error::AmbiguousPosition { .. }) => {}
                other => panic!("expected position rejection, got {other:?}"),
            }
        }
    }

    #[test]
    fn decoupled_emitter_leaves_the_packet_free() {
        let f = FieldSolution::from_params(
            SystemParams::new(0.0, 0.0).unwrap(),
            PacketParams::photon(0.5, 2.0).unwrap(),
        );
        for (r, t) in [(3.0f64, 7.0), (-4.0, 1.0), (0.25, 9.0)] {
            let full = f.channel_a(r, t).unwrap();
            assert_eq!(full, f.incoming(r, t).unwrap());
            assert_eq!(full, f.incoming(r - t, 0.0).unwrap());
            zero(f.channel_b(-r.abs(), t).unwrap());
        }
    }

    #[test]
    fn initial_probabilities_are_purely_incoming() {
        for c0 in [0.0, 0.5] {
            let f = FieldSolution::from_params(
                SystemParams::default(),
                PacketParams::new(0.5, 0.0, c0).unwrap(),
            );
            let l = f.default_grid_halfwidth(0.0);
            let p = f.channel_probabilities(0.0, l, 0.05).unwrap();
            assert_abs_diff_eq!(p.p_a, 1.0 - c0 * c0, epsilon = 1e-7);
            assert_eq!(p.p_b, 0.0);
            assert_eq!(p.p_e, 0.0);
            assert_abs_diff_eq!(p.norm, 1.0, epsilon = 1e-6);
        }
    }

    #[test]
    fn norm_is_conserved_while_the_packet_scatters() {
        for detuning in [0.0, 10.0] {
            let f = solution(0.1, detuning);
            let step = f.default_grid_step();
            for t in [1.0, 4.0] {
                let l = f.default_grid_halfwidth(t);
                let p = f.channel_probabilities(t, l, step).unwrap();
                assert_abs_diff_eq!(p.norm, 1.0, epsilon = 1e-6);
                assert!(p.p_a >= 0.0 && p.p_b >= 0.0);
            }
        }
    }

    #[test]
    fn quadrature_error_falls_fast_under_step_halving() {
        let f = solution(0.1, 10.0);
        let l = f.default_grid_halfwidth(4.0);
        let p = |h: f64| f.channel_probabilities(4.0, l, h).unwrap().p_a;
        let coarse = (p(0.01) - p(0.005)).abs();
        let fine = (p(0.005) - p(0.0025)).abs();
        assert!(
            coarse > 6.0 * fine || coarse < 1e-12,
            "coarse {coarse} fine {fine}"
        );
    }

    #[test]
    fn narrow_packets_are_almost_totally_reflected() {
        // Destructive interference behind the emitter.
        let f = solution(0.001, 0.0);
        let full = f.channel_a(5.0, 60.0).unwrap().norm_sqr();
        let free = f.incoming(5.0, 60.0).unwrap().norm_sqr();
        assert!(full <= 1e-2 * free, "ratio {}", full / free);
    }

    #[test]
    fn emitted_wave_is_pi_shifted_from_the_incoming_packet() {
        let f = solution(0.01, 0.0);
        for (r, t) in [(2.0, 5.0), (1.0, 3.0)] {
            let emitted = f.channel_b(-r, t).unwrap();
            let incoming = f.incoming(-r, t).unwrap();
            let diff = emitted.arg() - incoming.arg();
            let wrapped = (diff - std::f64::consts::PI).rem_euclid(2.0 * std::f64::consts::PI);
            let dist = wrapped.min(2.0 * std::f64::consts::PI - wrapped);
            assert!(dist <= 0.05, "phase difference off pi by {dist}");
        }
    }

    #[test]
    fn transmitted_fraction_matches_the_lorentzian_filter_limit() {
        // Long packets transmit delta/(delta + gamma) of their weight.
        let f = solution(0.01, 0.0);
        let p = f.transmitted_probability(1500.0, None).unwrap();
        let expect = 0.01 / 1.01;
        assert!(p <= 0.02);
        assert!((p - expect).abs() <= 0.05 * expect, "got {p}, want {expect}");
    }

    #[test]
    fn detector_ratio_reproduces_the_matched_rate_spots() {
        let f = solution(1.0, 0.0);
        let at = |t: f64| f.detector_ratio(t, 1.0).unwrap();
        assert_abs_diff_eq!(at(2.0).gamma, -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(at(3.0).gamma, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(at(2.0).lamb_shift, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn detector_ratio_tracks_the_reduced_rates_everywhere_valid() {
        for (delta, detuning) in [(0.1, 0.0), (0.1, 10.0), (1.0, 0.0), (10.0, 2.0)] {
            let f = solution(delta, detuning);
            for r_d in [1.0, 5.0] {
                let mut t = r_d + 0.05;
                while t < r_d + 8.0 {
                    let tau = t - r_d;
                    if let Ok(rates) = f.detector_ratio(t, r_d) {
                        let gamma = f.dynamics().decay_rate(tau).unwrap();
                        let shift = f.dynamics().lamb_shift(tau).unwrap();
                        let tol = 1e-10 * gamma.abs().max(1.0);
                        assert!(
                            (rates.gamma - gamma).abs() <= tol,
                            "t={t} r_d={r_d}: {} vs {gamma}",
                            rates.gamma
                        );
                        let tol_s = 1e-10 * shift.abs().max(1.0);
                        assert!((rates.lamb_shift - shift).abs() <= tol_s);
                    }
                    t += 0.05;
                }
            }
        }
    }

    #[test]
    fn detector_readings_are_retardation_covariant() {
        let f = solution(0.3, 4.0);
        let a = f.detector_ratio(2.5, 1.0).unwrap();
        let b = f.detector_ratio(4.5, 3.0).unwrap();
        assert_eq!(a.gamma.to_bits(), b.gamma.to_bits());
        assert_eq!(a.lamb_shift.to_bits(), b.lamb_shift.to_bits());
    }

    #[test]
    fn recovered_shift_includes_the_transition_frequency() {
        let f = FieldSolution::from_params(
            SystemParams::new(1.0, 3.0).unwrap(),
            PacketParams::photon(1.0, 0.0).unwrap(),
        );
        let rates = f.detector_ratio(2.0, 1.0).unwrap();
        assert_abs_diff_eq!(rates.lamb_shift, 6.0, epsilon = 1e-10);
    }

    #[test]
    fn backward_intensity_reads_out_the_population() {
        let f = solution(0.4, 3.0);
        let trace = f.detector_trace(2.0, &[1.0, 2.5, 4.0, 7.0]).unwrap();
        for s in &trace.samples {
            let tau = s.t - 2.0;
            let expect = if tau > 0.0 {
                0.5 * f.dynamics().population(tau).unwrap()
            } else {
                0.0
            };
            assert_abs_diff_eq!(s.intensity_b, expect, epsilon = 1e-15);
        }
        // Before the front arrives there is no rate to reconstruct.
        assert!(trace.samples[0].gamma_recovered.is_none());
        assert!(trace.samples[1].gamma_recovered.is_some());
    }

    #[test]
    fn detector_before_the_front_is_an_error() {
        let f = solution(1.0, 0.0);
        assert!(f.detector_ratio(0.5, 1.0).is_err());
        assert!(f.detector_ratio(1.0, 1.0).is_err());
    }

    #[test]
    fn singular_retarded_amplitude_is_reported() {
        // Population zero at tau = 2 pi / 10 for matched detuned packets.
        let f = solution(1.0, 10.0);
        let tau = 2.0 * std::f64::consts::PI / 10.0;
        match f.detector_ratio(tau + 1.0, 1.0) {
            Err(Error::SingularAmplitude { .. }) => {}
            other => panic!("expected singular ratio, got {other:?}"),
        }
    }

    #[test]
    fn undersized_windows_are_rejected_loudly() {
        let f = solution(0.1, 0.0);
        match f.channel_probabilities(2.0, 50.0, 0.05) {
            Err(Error::WindowTooSmall { .. }) => {}
            other => panic!("expected window error, got {other:?}"),
        }
        match f.channel_probabilities(2.0, 300.0, 5.0) {
            Err(Error::InvalidGrid { .. }) => {}
            other => panic!("expected step rejection, got {other:?}"),
        }
    }

    #[test]
    fn snapshot_grid_avoids_the_emitter_and_stays_ordered() {
        let f = solution(0.5, 2.0);
        let snap = f.snapshot(3.0, f.default_grid_halfwidth(3.0), 0.5).unwrap();
        assert_eq!(snap.grid.len() % 2, 0);
        assert!(snap.grid.windows(2).all(|w| w[0] < w[1]));
        assert!(snap.grid.iter().all(|&r| r != 0.0));
        for (r, phi) in snap.grid.iter().zip(&snap.phi_b) {
            if *r > 0.0 {
                zero(*phi);
            }
        }
        assert_abs_diff_eq!(snap.probabilities.norm, 1.0, epsilon = 1e-6);
    }
}
