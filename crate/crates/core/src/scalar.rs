//! Floating-point scalar abstraction.
//!
//! All numerical code in this crate is generic over [`RealScalar`] so the
//! same routines run in `f32` or `f64`. The crate root exports `f64`
//! aliases, which is what the CLI and the test suites use; `f32` is mainly
//! useful for quick, low-precision experiments.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real scalar type underlying all amplitudes, rates, and grids.
pub trait RealScalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum<Self>
    + Display
    + Debug
    + Send
    + Sync
    + 'static
{
    /// Shorthand conversion from an `f64` literal.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 literal converts to any RealScalar")
    }

    /// Lossy view as `f64`, used for diagnostics and error reports.
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> RealScalar for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + ToPrimitive
        + AddAssign
        + SubAssign
        + MulAssign
        + DivAssign
        + Sum<T>
        + Display
        + Debug
        + Send
        + Sync
        + 'static
{
}
