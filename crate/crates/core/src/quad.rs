//! Small numerical kernels: compensated summation, Simpson quadrature,
//! adaptive Simpson, and bisection root refinement.

use crate::error::{Error, Result};
use crate::scalar::RealScalar;

/// Compensated sum (Neumaier's variant of Kahan summation, which also
/// survives addends larger than the running sum); deterministic and
/// accurate for long series.
pub fn compensated_sum<T: RealScalar, I: IntoIterator<Item = T>>(values: I) -> T {
    let mut sum = T::zero();
    let mut carry = T::zero();
    for v in values {
        let t = sum + v;
        carry += if sum.abs() >= v.abs() {
            (sum - t) + v
        } else {
            (v - t) + sum
        };
        sum = t;
    }
    sum + carry
}

/// Composite Simpson rule with at least `min_panels` panels of width at
/// most `max_step`. Endpoints are evaluated, so the integrand must be
/// smooth on the closed interval.
pub fn composite_simpson<T: RealScalar>(
    mut f: impl FnMut(T) -> T,
    a: T,
    b: T,
    max_step: T,
    min_panels: usize,
) -> T {
    if b <= a {
        return T::zero();
    }
    let span = b - a;
    let mut panels = ((span / max_step).ceil().as_f64() as usize).max(min_panels).max(1);
    if panels % 2 == 1 {
        panels += 1;
    }
    let n = panels;
    let h = span / T::of(n as f64);
    let two = T::of(2.0);
    let four = T::of(4.0);
    let terms = (0..=n).map(|i| {
        let x = if i == n { b } else { a + h * T::of(i as f64) };
        let w = if i == 0 || i == n {
            T::one()
        } else if i % 2 == 1 {
            four
        } else {
            two
        };
        w * f(x)
    });
    compensated_sum(terms) * h / T::of(3.0)
}

/// Adaptive Simpson with Richardson acceptance test. `f` must be smooth on
/// the open interval; integrable endpoint spikes are handled by recursion.
pub fn adaptive_simpson<T: RealScalar>(
    f: &mut impl FnMut(T) -> T,
    a: T,
    b: T,
    tolerance: T,
    max_depth: u32,
) -> Result<T> {
    if b <= a {
        return Ok(T::zero());
    }
    let m = (a + b) * T::of(0.5);
    let fa = f(a);
    let fm = f(m);
    let fb = f(b);
    let whole = simpson_panel(fa, fm, fb, b - a);
    recurse(f, a, b, fa, fm, fb, whole, tolerance, max_depth).ok_or(Error::QuadratureFailure {
        a: a.as_f64(),
        b: b.as_f64(),
        tolerance: tolerance.as_f64(),
    })
}

fn simpson_panel<T: RealScalar>(fa: T, fm: T, fb: T, width: T) -> T {
    (fa + T::of(4.0) * fm + fb) * width / T::of(6.0)
}

#[allow(clippy::too_many_arguments)]
fn recurse<T: RealScalar>(
    f: &mut impl FnMut(T) -> T,
    a: T,
    b: T,
    fa: T,
    fm: T,
    fb: T,
    whole: T,
    tolerance: T,
    depth: u32,
) -> Option<T> {
    let m = (a + b) * T::of(0.5);
    let lm = (a + m) * T::of(0.5);
    let rm = (m + b) * T::of(0.5);
    let flm = f(lm);
    let frm = f(rm);
    let half = (b - a) * T::of(0.5);
    let left = simpson_panel(fa, flm, fm, half);
    let right = simpson_panel(fm, frm, fb, half);
    let delta = left + right - whole;
    // Below the rounding noise of the panel values, refinement cannot
    // make progress; accept rather than recurse forever.
    let noise = T::epsilon() * (left.abs() + right.abs() + whole.abs());
    if delta.abs() <= (T::of(15.0) * tolerance).max(noise) {
        return Some(left + right + delta / T::of(15.0));
    }
    if depth == 0 {
        return None;
    }
    let half_tol = tolerance * T::of(0.5);
    let l = recurse(f, a, m, fa, flm, fm, left, half_tol, depth - 1)?;
    let r = recurse(f, m, b, fm, frm, fb, right, half_tol, depth - 1)?;
    Some(l + r)
}

/// Bisection refinement of a bracketed sign change of `g`. Requires
/// `g(a)` and `g(b)` to have opposite (or zero) signs.
pub fn bisect<T: RealScalar>(
    g: &mut impl FnMut(T) -> T,
    mut a: T,
    mut b: T,
    xtol: T,
) -> Result<T> {
    let mut ga = g(a);
    if ga == T::zero() {
        return Ok(a);
    }
    let gb = g(b);
    if gb == T::zero() {
        return Ok(b);
    }
    if (ga > T::zero()) == (gb > T::zero()) {
        return Err(Error::RootFindingFailure {
            a: a.as_f64(),
            b: b.as_f64(),
            reason: "no sign change across the bracket",
        });
    }
    // 1 + ceil(log2(width / xtol)) iterations always suffice; the extra
    // margin keeps the loop finite for denormal-scale widths.
    for _ in 0..200 {
        let m = (a + b) * T::of(0.5);
        if (b - a).abs() <= xtol || m == a || m == b {
            return Ok(m);
        }
        let gm = g(m);
        if gm == T::zero() {
            return Ok(m);
        }
        if (gm > T::zero()) == (ga > T::zero()) {
            a = m;
            ga = gm;
        } else {
            b = m;
        }
    }
    Err(Error::RootFindingFailure {
        a: a.as_f64(),
        b: b.as_f64(),
        reason: "bisection iteration limit",
    })
}
