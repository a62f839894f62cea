//! Scalar bounds for the numeric side of the crate.
//!
//! Exact data (labels, rational coefficients, root-of-unity phases) is
//! evaluated into `Complex<T>` only where a numeric answer is needed:
//! inner products, constraint rows, and the nullspace computation. Those
//! paths are generic over the real scalar so the whole pipeline runs in
//! `f32` or `f64`; the crate root pins `f64` aliases for normal use.

use num_complex::Complex;
use num_traits::{Float, FromPrimitive};

/// Real scalar usable by the numeric evaluation and linear algebra paths.
pub trait Real: Float + FromPrimitive + std::fmt::Debug + std::fmt::Display + 'static {
    /// Lossy conversion from `f64`, for tolerances and exact-rational values.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 conversion")
    }

    fn two_pi() -> Self {
        Self::of(std::f64::consts::TAU)
    }
}

impl<T> Real for T where T: Float + FromPrimitive + std::fmt::Debug + std::fmt::Display + 'static {}

/// Squared modulus of a complex scalar.
pub fn norm_sqr<T: Real>(z: Complex<T>) -> T {
    z.re * z.re + z.im * z.im
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_is_implemented_for_floats() {
        fn assert_real<T: Real>() {}
        assert_real::<f32>();
        assert_real::<f64>();
    }

    #[test]
    fn norm_sqr_matches_norm() {
        let z = Complex::new(3.0_f64, -4.0);
        assert_eq!(norm_sqr(z), 25.0);
    }
}
