//! Scalar abstraction shared by every kernel in the crate.

use std::fmt::{Debug, Display};

use nalgebra::RealField;
use num_complex::Complex;
use num_traits::{FromPrimitive, ToPrimitive};

/// Real floating-point scalar the matrix kernels are generic over (f32 or f64).
pub trait Real:
    RealField + Copy + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static
{
    /// Machine epsilon.
    fn eps() -> Self;

    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar representable as f64")
    }
}

impl Real for f32 {
    #[inline]
    fn eps() -> Self {
        f32::EPSILON
    }
}

impl Real for f64 {
    #[inline]
    fn eps() -> Self {
        f64::EPSILON
    }
}

/// Complex scalar over a [`Real`] base field.
pub type C<T> = Complex<T>;
