//! Scalar abstraction: all numerics in this crate are generic over the
//! floating-point type through [`Scalar`], with `f64` aliases exported at the
//! crate root.

use num_traits::{FromPrimitive, ToPrimitive};

/// Floating-point scalar for the toolkit: `f32` or `f64`.
pub trait Scalar: nalgebra::RealField + FromPrimitive + ToPrimitive + Copy {}

impl<T> Scalar for T where T: nalgebra::RealField + FromPrimitive + ToPrimitive + Copy {}

/// Converts an `f64` constant into the working scalar type.
#[inline]
pub fn real<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("f64 constant must convert into the scalar type")
}

/// A named `f64` tolerance contract, widened to the scalar's working
/// precision so validating constructors stay usable at `f32`.
#[inline]
pub(crate) fn validation_tol<T: Scalar>(f64_tol: f64) -> T {
    real::<T>(f64_tol).max(T::default_epsilon() * real::<T>(1e3))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_convert_for_both_widths() {
        assert_eq!(real::<f64>(0.5), 0.5);
        assert_eq!(real::<f32>(0.5), 0.5f32);
    }
}
