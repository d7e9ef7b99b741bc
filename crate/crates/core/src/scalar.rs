//! Scalar abstraction for the deterministic numerical kernels.
//!
//! The core quadrature, synthesis and decomposition routines are generic over
//! the floating-point type; the stochastic experiment layer pins `f64` via the
//! aliases at the crate root.

use num_traits::float::FloatConst;
use num_traits::{Float, FromPrimitive, NumAssign};

/// Floating-point scalar: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssign + std::iter::Sum + std::fmt::Debug + std::fmt::Display + Send + Sync + 'static
{
}

impl<T> Real for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + NumAssign
        + std::iter::Sum
        + std::fmt::Debug
        + std::fmt::Display
        + Send
        + Sync
        + 'static
{
}

/// Shorthand for lossy `f64 -> R` conversion of exact constants.
#[inline]
pub fn r<R: Real>(x: f64) -> R {
    R::from_f64(x).expect("constant representable in every Real type")
}

/// `usize -> R`, exact for the sizes used here.
#[inline]
pub fn ru<R: Real>(x: usize) -> R {
    R::from_usize(x).expect("size representable in every Real type")
}
