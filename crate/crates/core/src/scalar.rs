//! Scalar abstraction shared by every computational module.

use nalgebra as na;
use num_traits as nt;

/// Floating point type usable by the models: `f32` or `f64`.
///
/// Built on `nalgebra::RealField` so the linear-algebra code and the
/// closed-form formulas share one bound.
pub trait Scalar: Copy + na::RealField + na::Scalar + nt::FloatConst + nt::FromPrimitive + nt::ToPrimitive {
    /// Converts an `f64` literal or constant into this scalar type.
    fn lit(value: f64) -> Self;

    /// Lossy view as `f64`, used for messages and output.
    fn as_f64(self) -> f64;
}

macro_rules! impl_scalar {
    ($f:ty) => {
        impl Scalar for $f {
            #[inline]
            fn lit(value: f64) -> Self {
                value as $f
            }

            #[inline]
            fn as_f64(self) -> f64 {
                self as f64
            }
        }
    };
}

impl_scalar!(f32);
impl_scalar!(f64);
