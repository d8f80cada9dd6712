//! Floating-point scalar abstraction.

use ndarray::NdFloat;
use num_traits::{FromPrimitive, NumAssign};

/// Scalar type underlying all numeric routines: `f32` or `f64`.
pub trait Scalar: NdFloat + NumAssign + FromPrimitive + Default + std::iter::Sum {}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Convert an `f64` into the working scalar type.
#[inline]
pub(crate) fn cast<F: Scalar>(x: f64) -> F {
    F::from_f64(x).expect("f64 representable in scalar type")
}

/// Convert a count into the working scalar type.
#[inline]
pub(crate) fn cast_n<F: Scalar>(x: usize) -> F {
    F::from_usize(x).expect("usize representable in scalar type")
}
