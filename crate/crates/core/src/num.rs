//! Floating-point scalar abstraction.

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating-point scalar for all core math: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + core::fmt::Debug + core::fmt::Display + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Shorthand for converting an `f64` constant into the working scalar.
pub(crate) fn real<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("finite f64 constant converts to scalar")
}

/// Converts a sample count or index into the working scalar.
pub(crate) fn real_usize<T: Real>(n: usize) -> T {
    T::from_usize(n).expect("usize converts to scalar")
}
