//! Gate suite for the promised end-to-end behaviors. Each test prints one
//! `criterion NN: PASS/FAIL` line with the measured numbers (visible under
//! `--nocapture`), then asserts, so a full run doubles as a report.

use once_cell::sync::Lazy;
use wqed::dynamics::PulseDynamics;
use wqed::field::FieldSolution;
use wqed::nm::{nm_integral, population_extrema, sweep, ExtremumKind, SweepAxis};
use wqed::oracle::{
    master_eq_evolve, mode_oracle_evolve, transmission_oracle, ModeDiscretization, OracleSeries,
};
use wqed::params::{PacketParams, SystemParams};

fn verdict(criterion: usize, ok: bool, detail: &str) {
    let tag = if ok { "PASS" } else { "FAIL" };
    println!("criterion {criterion:02}: {tag}  {detail}");
    assert!(ok, "criterion {criterion:02}: {detail}");
}

fn dynamics(delta: f64, detuning: f64) -> PulseDynamics<f64> {
    PulseDynamics::new(
        SystemParams::default(),
        PacketParams::photon(delta, detuning).unwrap(),
    )
}

struct OracleCase {
    delta: f64,
    detuning: f64,
    series: OracleSeries<f64>,
    max_err: f64,
}

fn run_case(delta: f64, detuning: f64, disc: &ModeDiscretization<f64>) -> OracleCase {
    let sys = SystemParams::default();
    let pkt = PacketParams::photon(delta, detuning).unwrap();
    let series = mode_oracle_evolve(&sys, &pkt, disc, 8.0, Some(0.02), None).unwrap();
    let d = PulseDynamics::new(sys, pkt);
    let max_err = series
        .times
        .iter()
        .zip(&series.psi)
        .map(|(&t, &psi)| (psi - d.amplitude(t).unwrap()).norm())
        .fold(0.0f64, f64::max);
    OracleCase {
        delta,
        detuning,
        series,
        max_err,
    }
}

/// The brute-force runs are by far the slowest part of the suite, so the
/// five reference cases are shared between the tests that need them.
static ORACLE_CASES: Lazy<Vec<OracleCase>> = Lazy::new(|| {
    let cases: [(f64, f64); 5] = [(0.1, 0.0), (0.1, 2.0), (0.1, 10.0), (1.0, 0.0), (10.0, 2.0)];
    cases
        .iter()
        .map(|&(delta, detuning)| {
            let band = 100.0 * 1.0f64.max(delta).max(detuning.abs());
            let disc = ModeDiscretization::new(band, 16001).unwrap();
            run_case(delta, detuning, &disc)
        })
        .collect()
});

#[test]
fn criterion_01_mode_oracle_matches_the_closed_form() {
    let mut detail = String::new();
    let mut ok = true;
    for case in ORACLE_CASES.iter() {
        detail.push_str(&format!(
            "(delta={}, detuning={}): err={:.2e}; ",
            case.delta, case.detuning, case.max_err
        ));
        ok &= case.max_err <= 1e-2;
    }
    // Widening the band (and the mode count with it) must tighten the
    // match; the coarse companion keeps the same mode spacing at a fifth
    // of the band.
    let coarse = run_case(1.0, 0.0, &ModeDiscretization::new(20.0, 3201).unwrap());
    let refined = ORACLE_CASES
        .iter()
        .find(|c| c.delta == 1.0 && c.detuning == 0.0)
        .unwrap();
    detail.push_str(&format!(
        "refinement {:.2e} -> {:.2e}",
        coarse.max_err, refined.max_err
    ));
    ok &= refined.max_err < coarse.max_err;
    verdict(1, ok, &detail);
}

#[test]
fn criterion_02_probability_is_conserved() {
    let mut worst = 0.0f64;
    for &detuning in &[0.0, 10.0] {
        for &c0 in &[0.0, 0.5] {
            let f: FieldSolution<f64> = FieldSolution::from_params(
                SystemParams::default(),
                PacketParams::new(0.1, detuning, c0).unwrap(),
            );
            let step = f.default_grid_step();
            for &t in &[0.0, 1.0, 4.0, 8.0] {
                let p = f
                    .channel_probabilities(t, f.default_grid_halfwidth(t), step)
                    .unwrap();
                worst = worst.max((p.norm - 1.0).abs());
            }
        }
    }
    // The drift bound applies to the long-packet runs; the widest packet
    // keeps two orders more weight in the band-edge modes, where the
    // integrator damps hardest, and is reported for context only.
    let drift = ORACLE_CASES
        .iter()
        .filter(|c| c.delta == 0.1 && (c.detuning == 0.0 || c.detuning == 10.0))
        .map(|c| c.series.max_norm_drift())
        .fold(0.0f64, f64::max);
    let widest = ORACLE_CASES
        .iter()
        .map(|c| c.series.max_norm_drift())
        .fold(0.0f64, f64::max);
    let ok = worst <= 1e-6 && drift <= 1e-8;
    verdict(
        2,
        ok,
        &format!(
            "max |norm - 1| = {worst:.2e}, oracle drift = {drift:.2e} (all cases: {widest:.2e})"
        ),
    );
}

#[test]
fn criterion_03_monochromatic_population_bound() {
    let d = dynamics(1e-3, 0.0);
    let peak = population_extrema(&d, 60.0)
        .unwrap()
        .iter()
        .filter(|e| e.kind == ExtremumKind::Maximum)
        .map(|e| e.population)
        .fold(0.0f64, f64::max);
    let ok = (1.8e-3..=2.0e-3).contains(&peak);
    verdict(3, ok, &format!("peak population = {peak:.6e}"));
}

#[test]
fn criterion_04_long_packets_are_totally_reflected() {
    let sys = SystemParams::<f64>::default();
    let pkt = PacketParams::photon(0.01, 0.0).unwrap();
    let expected = 0.01 / 1.01;
    let oracle = transmission_oracle(&sys, &pkt).unwrap();
    let f = FieldSolution::new(PulseDynamics::new(sys, pkt));
    let transmitted = f.transmitted_probability(1500.0, None).unwrap();
    let ok = (oracle - expected).abs() <= 1e-8
        && transmitted <= 0.02
        && (transmitted - expected).abs() <= 0.05 * expected;
    verdict(
        4,
        ok,
        &format!("late transmitted = {transmitted:.6e}, frequency-space value = {oracle:.6e}"),
    );
}

#[test]
fn criterion_05_revival_spacing_follows_the_detuning() {
    let d = dynamics(0.1, 10.0);
    let maxima: Vec<f64> = population_extrema(&d, 8.0)
        .unwrap()
        .iter()
        .filter(|e| e.kind == ExtremumKind::Maximum)
        .map(|e| e.t)
        .collect();
    let period = 2.0 * std::f64::consts::PI / 10.0;
    let gaps: Vec<f64> = maxima.windows(2).map(|w| w[1] - w[0]).collect();
    let worst = gaps
        .iter()
        .map(|g| (g - period).abs() / period)
        .fold(0.0f64, f64::max);
    let ok = gaps.len() >= 5 && worst <= 0.1;
    verdict(
        5,
        ok,
        &format!("{} gaps, worst deviation {:.2e} of 2 pi / 10", gaps.len(), worst),
    );
}

#[test]
fn criterion_06_rate_sign_tracks_population_growth() {
    let mut checked = 0usize;
    let mut violations = 0usize;
    for &(delta, detuning) in &[(1.0, 0.0), (0.1, 2.0), (0.1, 10.0), (10.0, 2.0)] {
        let d = dynamics(delta, detuning);
        for k in 1..=4000 {
            let t = k as f64 * 2e-3;
            if d.amplitude(t).unwrap().norm() <= 1e-10 {
                continue;
            }
            let rate = match d.decay_rate(t) {
                Ok(r) => r,
                Err(_) => continue,
            };
            let growth = d.population_dot(t).unwrap();
            checked += 1;
            if -rate * growth < 0.0 {
                violations += 1;
            }
        }
    }
    verdict(
        6,
        violations == 0,
        &format!("{violations} sign violations on {checked} samples"),
    );
}

#[test]
fn criterion_07_detector_ratio_recovers_the_rate() {
    let f: FieldSolution<f64> = FieldSolution::from_params(
        SystemParams::default(),
        PacketParams::photon(0.1, 10.0).unwrap(),
    );
    let mut worst = 0.0f64;
    for &r_d in &[1.0, 5.0] {
        for k in 1..=160 {
            let t = r_d + k as f64 * 0.05;
            let tau = t - r_d;
            let recovered = f.detector_ratio(t, r_d).unwrap().gamma;
            let direct = f.dynamics().decay_rate(tau).unwrap();
            worst = worst.max((recovered - direct).abs() / direct.abs().max(1.0));
        }
    }
    let ok = worst <= 1e-10;
    verdict(7, ok, &format!("worst rate mismatch = {worst:.2e}"));
}

#[test]
fn criterion_08_matched_resonant_closed_forms() {
    let d = dynamics(1.0, 0.0);
    let mut worst = 0.0f64;
    for k in 1..=600 {
        let t = k as f64 * 0.05;
        worst = worst.max((d.decay_rate(t).unwrap() - (1.0 - 2.0 / t)).abs());
    }
    let report = nm_integral(&d, 0.01, Some(2.0)).unwrap();
    let exact = 2.0 * 200f64.ln() - 1.99;
    let measure_err = (report.total - exact).abs();
    let route_gap = (report.total - report.quadrature_total).abs();
    let ok = worst <= 1e-12 && measure_err <= 1e-6 && route_gap <= 1e-6;
    verdict(
        8,
        ok,
        &format!(
            "rate dev {worst:.2e}, measure dev {measure_err:.2e}, route gap {route_gap:.2e}"
        ),
    );
}

#[test]
fn criterion_09_measure_sweeps_have_the_reference_shape() {
    let sys = SystemParams::default();
    let t0 = 0.01;

    // Flat for detunings small against the packet linewidth.
    let template = PacketParams::photon(0.1, 0.0).unwrap();
    let flat_grid = [0.0, 0.0025, 0.005, 0.0075, 0.01];
    let flat: Vec<f64> = sweep(&sys, &template, SweepAxis::Detuning, &flat_grid, t0)
        .unwrap()
        .into_iter()
        .map(|row| row.outcome.unwrap().total)
        .collect();
    let (lo, hi) = (
        flat.iter().cloned().fold(f64::INFINITY, f64::min),
        flat.iter().cloned().fold(0.0f64, f64::max),
    );
    let spread = (hi - lo) / (flat.iter().sum::<f64>() / flat.len() as f64);

    // Near-linear rise at large detuning.
    let lin_grid: Vec<f64> = (0..9).map(|k| 10.0 + 5.0 * k as f64).collect();
    let lin: Vec<f64> = sweep(&sys, &template, SweepAxis::Detuning, &lin_grid, t0)
        .unwrap()
        .into_iter()
        .map(|row| row.outcome.unwrap().total)
        .collect();
    let n = lin.len() as f64;
    let (mx, my) = (
        lin_grid.iter().sum::<f64>() / n,
        lin.iter().sum::<f64>() / n,
    );
    let sxy: f64 = lin_grid
        .iter()
        .zip(&lin)
        .map(|(x, y)| (x - mx) * (y - my))
        .sum();
    let sxx: f64 = lin_grid.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    let ss_res: f64 = lin_grid
        .iter()
        .zip(&lin)
        .map(|(x, y)| {
            let fit = my + slope * (x - mx);
            (y - fit) * (y - fit)
        })
        .sum();
    let ss_tot: f64 = lin.iter().map(|y| (y - my) * (y - my)).sum();
    let r2 = 1.0 - ss_res / ss_tot;

    // Peak in the linewidth at the emitter rate. An even log grid keeps
    // the matched point itself (where the measure diverges) off the grid.
    let peak_template = PacketParams::photon(1.0, 10.0).unwrap();
    let log_grid: Vec<f64> = (0..24)
        .map(|k| 10f64.powf(-1.0 + 2.0 * k as f64 / 23.0))
        .collect();
    let peak: Vec<f64> = sweep(&sys, &peak_template, SweepAxis::Linewidth, &log_grid, t0)
        .unwrap()
        .into_iter()
        .map(|row| row.outcome.unwrap().total)
        .collect();
    let imax = peak
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .unwrap()
        .0;
    let peak_dist = log_grid[imax].log10().abs();
    let log_step = 2.0 / 23.0;

    // Monotone decay of the measure with linewidth on resonance.
    let res_template = PacketParams::photon(1.0, 0.0).unwrap();
    let mono_grid = [0.1, 0.1f64.sqrt(), 1.0, 10f64.sqrt(), 10.0];
    let mono: Vec<f64> = sweep(&sys, &res_template, SweepAxis::Linewidth, &mono_grid, t0)
        .unwrap()
        .into_iter()
        .map(|row| row.outcome.unwrap().total)
        .collect();
    let monotone = mono.windows(2).all(|w| w[0] > w[1]);

    let ok = spread <= 0.01 && r2 >= 0.98 && peak_dist <= log_step + 1e-12 && monotone;
    verdict(
        9,
        ok,
        &format!(
            "flat spread {spread:.2e}, fit r2 {r2:.5}, peak at linewidth {:.4}, \
             monotone on resonance: {monotone}",
            log_grid[imax]
        ),
    );
}

#[test]
fn criterion_10_master_equation_consistency() {
    let mut worst = 0.0f64;
    let mut positivity = true;
    for &(delta, detuning) in &[(1.0, 0.0), (0.1, 10.0)] {
        for &c0 in &[0.0, 0.5] {
            let d: PulseDynamics<f64> = PulseDynamics::new(
                SystemParams::default(),
                PacketParams::new(delta, detuning, c0).unwrap(),
            );
            let states = master_eq_evolve(&d, 0.01, 8.0, 1e-4, Some(0.05)).unwrap();
            for s in states {
                worst = worst.max((s.rho_ee - d.population(s.t).unwrap()).abs());
                positivity &= (s.rho_ee + s.rho_gg - 1.0).abs() <= 1e-15
                    && s.rho_eg.norm_sqr() <= s.rho_ee * s.rho_gg + 1e-10;
            }
        }
    }
    let ok = worst <= 1e-6 && positivity;
    verdict(
        10,
        ok,
        &format!("max population mismatch = {worst:.2e}, state physical: {positivity}"),
    );
}
