//! Floating-point scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};
use rustfft::FftNum;

/// Real scalar the estimators are generic over: `f32` or `f64`.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + NumAssign + FftNum + Debug + Display + Default
{
    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(value: f64) -> Self {
        Self::from_f64(value).expect("f64 literal representable in scalar type")
    }

    #[inline]
    fn from_usize_lossy(value: usize) -> Self {
        Self::from_usize(value).expect("usize representable in scalar type")
    }

    /// Relative gate for round-off checks: `floor` for double precision,
    /// loosened in proportion to machine epsilon for narrower types.
    #[inline]
    fn roundoff_gate(floor: f64, eps_multiple: f64) -> Self {
        let scaled = Self::epsilon() * Self::lit(eps_multiple);
        scaled.max(Self::lit(floor))
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
