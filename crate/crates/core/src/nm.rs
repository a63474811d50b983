//! Non-Markovianity of the reduced dynamics.
//!
//! The population of the emitter can grow only by absorbing the photon
//! back from the guide; every interval of population growth is an interval
//! where the instantaneous decay rate is negative, and the accumulated
//! negative rate
//!
//! ```text
//! N = integral over t of max(0, -rate(t))
//! ```
//!
//! is the information-backflow measure computed here. Because
//! `-rate = d ln |psi|^2 / dt` on growth intervals, each interval
//! contributes `ln(pop(end) / pop(start))` exactly; the quadrature of
//! `-rate` over the same intervals is carried along as an independent
//! cross-check. The integrand diverges logarithmically at t -> 0 (the
//! population starts at zero), so the measure is defined with an explicit
//! lower cutoff `t0`; the first interval's contribution is also reported
//! separately so cutoff-free comparisons can exclude the initial rise.

use crate::dynamics::PulseDynamics;
use crate::error::{Error, Result};
use crate::params::{PacketParams, SystemParams};
use crate::quad::{adaptive_simpson, bisect, compensated_sum};
use crate::scalar::RealScalar;

/// Bisection width for extremum refinement.
const ROOT_XTOL: f64 = 1e-10;

/// A refined stationary point of the population.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtremumKind {
    Maximum,
    Minimum,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtremumEvent<T: RealScalar> {
    pub t: T,
    pub population: T,
    pub kind: ExtremumKind,
}

/// Result of the measure integral on `[t0, t_max]`.
#[derive(Debug, Clone, PartialEq)]
pub struct NmReport<T: RealScalar> {
    pub t0: T,
    pub t_max: T,
    /// Population-growth intervals, clipped to the integration window.
    pub intervals: Vec<(T, T)>,
    /// `ln(pop(end)/pop(start))` for each interval.
    pub contributions: Vec<T>,
    /// Sum of the contributions.
    pub total: T,
    /// The same integral done by adaptive quadrature of `-rate`.
    pub quadrature_total: T,
    /// Total minus the initial-rise interval, independent of `t0`.
    pub excluding_initial_rise: T,
}

/// Scan step for locating sign changes of the population derivative.
fn scan_step<T: RealScalar>(dynamics: &PulseDynamics<T>) -> T {
    let gamma = dynamics.system().gamma_1d();
    let delta = dynamics.packet().delta();
    let detuning = dynamics.packet().detuning().abs();
    let mut h = T::of(0.1) / delta;
    if gamma > T::zero() {
        h = h.min(T::of(0.01) / gamma);
    }
    let osc = detuning.max(gamma);
    if osc > T::zero() {
        h = h.min(T::of(0.1) / osc);
    }
    h
}

/// All population extrema in `(0, t_max]`, refined to within 1e-10 and
/// strictly ordered. Maxima and minima alternate; tangential stationary
/// points (no sign change of the derivative) are dropped.
pub fn population_extrema<T: RealScalar>(
    dynamics: &PulseDynamics<T>,
    t_max: T,
) -> Result<Vec<ExtremumEvent<T>>> {
    if !t_max.is_finite() || t_max <= T::zero() {
        return Err(Error::InvalidTime {
            t: t_max.as_f64(),
            reason: "extrema scan needs finite t_max > 0",
        });
    }
    let h = scan_step(dynamics);
    let n = (t_max / h).ceil().as_f64() as usize;
    if n > 50_000_000 {
        return Err(Error::InvalidGrid {
            reason: format!("extrema scan would need {n} samples; window too long for these rates"),
        });
    }
    let mut g = |t: T| dynamics.population_dot(t).unwrap_or(T::zero());

    let mut events: Vec<ExtremumEvent<T>> = Vec::new();
    let mut last_signed: Option<(T, T)> = None;
    let mut zeros_between: Vec<T> = Vec::new();
    let xtol = T::of(ROOT_XTOL);

    let record = |events: &mut Vec<ExtremumEvent<T>>, t_root: T, was_positive: bool| {
        let population = dynamics.population(t_root).unwrap_or(T::zero());
        events.push(ExtremumEvent {
            t: t_root,
            population,
            kind: if was_positive {
                ExtremumKind::Maximum
            } else {
                ExtremumKind::Minimum
            },
        });
    };

    for i in 1..=n {
        let t = if i == n {
            t_max
        } else {
            h * T::of(i as f64)
        };
        let gi = g(t);
        if gi == T::zero() {
            zeros_between.push(t);
            continue;
        }
        if let Some((tp, gp)) = last_signed {
            if (gp > T::zero()) != (gi > T::zero()) {
                let t_root = if let Some(&tz) = zeros_between.first() {
                    tz
                } else {
                    bisect(&mut g, tp, t, xtol)?
                };
                record(&mut events, t_root, gp > T::zero());
            }
            // Same sign on both sides of any zeros: tangency, dropped.
        }
        last_signed = Some((t, gi));
        zeros_between.clear();
    }
    // The scan can end exactly on a stationary point (derivative == 0).
    if let (Some(&tz), Some((_, gp))) = (zeros_between.first(), last_signed) {
        record(&mut events, tz, gp > T::zero());
    }
    Ok(events)
}

/// Default integration horizon: ten times the slowest time scale, then
/// extended until the drive has decayed below 1e-8 and a trailing window
/// of five lifetimes shows no population growth.
fn quiescent_horizon<T: RealScalar>(dynamics: &PulseDynamics<T>) -> Result<T> {
    let gamma = dynamics.system().gamma_1d();
    let delta = dynamics.packet().delta();
    let mut t_end = T::of(10.0) * (delta.recip().max(gamma.recip()));
    let window = T::of(5.0) / gamma;
    let h = scan_step(dynamics);
    let cap = t_end * T::of(1000.0);
    loop {
        let drive_quiet = (-delta * T::of(0.5) * t_end).exp() < T::of(1e-8);
        let mut growth = false;
        let mut t = t_end;
        while t <= t_end + window {
            if dynamics.population_dot(t).unwrap_or(T::zero()) > T::zero() {
                growth = true;
                break;
            }
            t += h;
        }
        if drive_quiet && !growth {
            return Ok(t_end);
        }
        t_end += window;
        if t_end > cap {
            return Err(Error::InvalidGrid {
                reason: "no quiescent tail found; cannot bound the measure window".to_string(),
            });
        }
    }
}

/// Accumulated negative decay rate over `[t0, t_max]`.
///
/// `t_max = None` picks the quiescent horizon automatically. Errors when
/// `t0` is not below the first population maximum, and when a population
/// minimum inside the window is numerically indistinguishable from zero
/// (the integral has no finite value there).
pub fn nm_integral<T: RealScalar>(
    dynamics: &PulseDynamics<T>,
    t0: T,
    t_max: Option<T>,
) -> Result<NmReport<T>> {
    if !t0.is_finite() || t0 <= T::zero() {
        return Err(Error::InvalidTime {
            t: t0.as_f64(),
            reason: "cutoff t0 must be finite and > 0",
        });
    }
    if dynamics.system().gamma_1d() == T::zero() {
        // Decoupled emitter: nothing is ever absorbed.
        let t_end = t_max.unwrap_or_else(|| T::of(10.0) / dynamics.packet().delta());
        return Ok(NmReport {
            t0,
            t_max: t_end,
            intervals: Vec::new(),
            contributions: Vec::new(),
            total: T::zero(),
            quadrature_total: T::zero(),
            excluding_initial_rise: T::zero(),
        });
    }
    let t_end = match t_max {
        Some(t) => {
            if !t.is_finite() || t <= t0 {
                return Err(Error::InvalidTime {
                    t: t.as_f64(),
                    reason: "t_max must be finite and > t0",
                });
            }
            t
        }
        None => quiescent_horizon(dynamics)?,
    };

    let events = population_extrema(dynamics, t_end)?;
    if let Some(first) = events.first() {
        if first.kind == ExtremumKind::Minimum {
            return Err(Error::InvalidGrid {
                reason: "population scan started on a falling segment; inconsistent extrema"
                    .to_string(),
            });
        }
        if t0 >= first.t {
            return Err(Error::CutoffBeyondFirstRise {
                t0: t0.as_f64(),
                first_max: first.t.as_f64(),
            });
        }
    }

    // Population-growth intervals: [t0 -> first max], then each
    // [minimum -> following max], with the window end closing a trailing
    // rise.
    let mut intervals: Vec<(T, T)> = Vec::new();
    match events.first() {
        Some(first) => intervals.push((t0, first.t)),
        None => intervals.push((t0, t_end)),
    }
    let mut idx = 1;
    while idx < events.len() {
        let ev = &events[idx];
        if ev.kind == ExtremumKind::Minimum {
            let end = events.get(idx + 1).map(|m| m.t).unwrap_or(t_end);
            if ev.t < end {
                intervals.push((ev.t, end));
            }
            idx += 2;
        } else {
            idx += 1;
        }
    }

    // A growth interval starting at a numerically-zero minimum means the
    // measure diverges (the rate has a non-integrable spike there).
    for ev in &events {
        if ev.kind == ExtremumKind::Minimum {
            let amp = ev.population.sqrt();
            let slope = dynamics.amplitude_dot(ev.t).map(|d| d.norm())?;
            let floor = T::of(1e-14).max(T::of(100.0 * ROOT_XTOL) * slope);
            if amp < floor {
                return Err(Error::DivergentMeasure {
                    t: ev.t.as_f64(),
                    population: ev.population.as_f64(),
                });
            }
        }
    }

    let pop = |t: T| dynamics.population(t);
    let p0 = pop(t0)?;
    if p0.sqrt() < T::of(1e-14) {
        return Err(Error::SingularAmplitude {
            t: t0.as_f64(),
            magnitude: p0.sqrt().as_f64(),
        });
    }

    let mut contributions = Vec::with_capacity(intervals.len());
    let mut quadrature_parts = Vec::with_capacity(intervals.len());
    for &(a, b) in &intervals {
        let pa = pop(a)?;
        let pb = pop(b)?;
        let contrib = (pb / pa).ln();
        let mut neg_rate = |t: T| {
            let p = dynamics.population(t).unwrap_or(T::one());
            let pd = dynamics.population_dot(t).unwrap_or(T::zero());
            pd / p
        };
        let tol = T::of(1e-9) * T::one().max(contrib.abs());
        let quad = adaptive_simpson(&mut neg_rate, a, b, tol, 64)?;
        contributions.push(contrib);
        quadrature_parts.push(quad);
    }

    let total = compensated_sum(contributions.iter().copied());
    let quadrature_total = compensated_sum(quadrature_parts.iter().copied());
    let excluding_initial_rise = total - contributions.first().copied().unwrap_or(T::zero());

    Ok(NmReport {
        t0,
        t_max: t_end,
        intervals,
        contributions,
        total,
        quadrature_total,
        excluding_initial_rise,
    })
}

/// Which packet parameter a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    Detuning,
    Linewidth,
}

/// One sweep point; invalid parameter values produce an error outcome
/// instead of aborting the whole sweep.
#[derive(Debug, Clone)]
pub struct SweepRow<T: RealScalar> {
    pub param: T,
    pub outcome: Result<NmReport<T>>,
}

/// Measure as a function of detuning or linewidth over `grid`, holding the
/// other packet parameters at the template's values. Rows come back in
/// grid order; each row is computed independently.
pub fn sweep<T: RealScalar>(
    sys: &SystemParams<T>,
    template: &PacketParams<T>,
    axis: SweepAxis,
    grid: &[T],
    t0: T,
) -> Result<Vec<SweepRow<T>>> {
    if grid.is_empty() {
        return Err(Error::InvalidGrid {
            reason: "sweep grid is empty".to_string(),
        });
    }
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidGrid {
            reason: "sweep grid must be strictly increasing".to_string(),
        });
    }
    Ok(grid
        .iter()
        .map(|&param| {
            let pkt = match axis {
                SweepAxis::Detuning => {
                    PacketParams::new(template.delta(), param, template.c0())
                }
                SweepAxis::Linewidth => {
                    PacketParams::new(param, template.detuning(), template.c0())
                }
            };
            let outcome = pkt.and_then(|pkt| {
                nm_integral(&PulseDynamics::new(*sys, pkt), t0, None)
            });
            SweepRow { param, outcome }
        })
        .collect())
}
