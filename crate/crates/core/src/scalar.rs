//! Floating-point abstraction so the numeric core works with `f32` or `f64`.

use ndarray::NdFloat;
use num_traits::FromPrimitive;

/// Scalar type for all matrix/vector math in this crate.
///
/// `NdFloat` bundles the arithmetic, assignment and `ndarray` operand traits
/// needed for dense linear algebra; `FromPrimitive` covers conversions from
/// literals and counts. RNG draws are always taken as `f64` and converted, so
/// the random stream is identical regardless of the scalar in use.
pub trait Scalar: NdFloat + FromPrimitive + std::iter::Sum {
    /// Lossy conversion from `f64` (exact for `f64`, rounded for `f32`).
    fn from_f(x: f64) -> Self;
    /// Widening conversion to `f64` (exact for both supported types).
    fn to_f(self) -> f64;
}

impl Scalar for f64 {
    #[inline]
    fn from_f(x: f64) -> Self {
        x
    }
    #[inline]
    fn to_f(self) -> f64 {
        self
    }
}

impl Scalar for f32 {
    #[inline]
    fn from_f(x: f64) -> Self {
        x as f32
    }
    #[inline]
    fn to_f(self) -> f64 {
        f64::from(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sum_generic<S: Scalar>(xs: &[S]) -> S {
        xs.iter().copied().sum()
    }

    #[test]
    fn works_for_both_widths() {
        assert_eq!(sum_generic(&[1.0f64, 2.0, 3.0]), 6.0);
        assert_eq!(sum_generic(&[1.0f32, 2.0, 3.0]), 6.0);
        assert_eq!(f32::from_f(0.5).to_f(), 0.5);
    }
}
