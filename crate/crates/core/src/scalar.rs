//! Scalar abstraction shared by every numerical module.

use std::fmt::{Debug, Display, LowerExp};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating-point type the solver can run on: `f32` or `f64`.
///
/// The `faer::traits::RealField` bound lets the same type flow into the sparse
/// factorization without conversion.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Default
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
    + faer::traits::RealField
{
    /// Converts an `f64` literal. Every supported type can represent the
    /// value (possibly rounded), so this never fails.
    #[inline]
    fn lit(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("finite literal")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::lit(n as f64)
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// A point in the plate midplane.
pub type Point<T> = [T; 2];

#[inline]
pub(crate) fn lit<T: Scalar>(x: f64) -> T {
    T::lit(x)
}
