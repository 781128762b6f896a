//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real floating-point scalar: `f32` or `f64`.
///
/// Tolerances throughout the crate are written as `f64` literals and pass
/// through [`Real::tol`], which clamps them to a small multiple of machine
/// epsilon so that the `f32` instantiation keeps working, albeit at reduced
/// accuracy.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Default
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// A tolerance of `x`, never below `64·ε`.
    #[inline]
    fn tol(x: f64) -> Self {
        Self::lit(x).max(Self::epsilon() * Self::lit(64.0))
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// `-x log2 x` with the convention `η(0) = 0`.
    #[inline]
    fn eta(self) -> Self {
        if self <= Self::zero() {
            Self::zero()
        } else {
            -self * self.log2()
        }
    }
}

impl Real for f32 {}
impl Real for f64 {}
