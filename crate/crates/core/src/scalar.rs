//! Number abstraction shared by the analytic engines.
//!
//! The closed-form and recursion engines only need field operations and
//! small integer constants, so they are written once against [`Scalar`] and
//! instantiated with either [`Rational`] (exact, used for bit-identical
//! cross-checks) or `f64`/`f32`.

use std::fmt::Debug;
use std::ops::Neg;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, ToPrimitive};

/// Arbitrary-precision rational; always kept in lowest terms with a positive
/// denominator by `num-rational`.
pub type Rational = BigRational;

pub trait Scalar:
    Num + Neg<Output = Self> + Clone + PartialOrd + Debug + Send + Sync + 'static
{
    fn from_i64(n: i64) -> Self;

    fn as_f64(&self) -> f64;

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_i64(num) / Self::from_i64(den)
    }

    fn half() -> Self {
        Self::from_ratio(1, 2)
    }

    /// Exact only for integers up to the type's mantissa width in float mode.
    fn from_u128(n: u128) -> Self;
}

impl Scalar for f64 {
    fn from_i64(n: i64) -> Self {
        n as f64
    }

    fn as_f64(&self) -> f64 {
        *self
    }

    fn from_u128(n: u128) -> Self {
        n as f64
    }
}

impl Scalar for f32 {
    fn from_i64(n: i64) -> Self {
        n as f32
    }

    fn as_f64(&self) -> f64 {
        f64::from(*self)
    }

    fn from_u128(n: u128) -> Self {
        n as f32
    }
}

impl Scalar for Rational {
    fn from_i64(n: i64) -> Self {
        Rational::from_integer(BigInt::from(n))
    }

    fn as_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_u128(n: u128) -> Self {
        Rational::from_integer(BigInt::from(n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::{One, Signed, Zero};

    #[test]
    fn rationals_stay_in_lowest_terms() {
        let a = Rational::from_ratio(6, -8);
        assert_eq!(*a.numer(), BigInt::from(-3));
        assert_eq!(*a.denom(), BigInt::from(4));

        let b = Rational::from_ratio(1, 6) + Rational::from_ratio(1, 3);
        assert_eq!(b, Rational::half());
        assert!(b.denom().is_positive());
    }

    #[test]
    fn rational_field_ops_are_exact() {
        let third = Rational::from_ratio(1, 3);
        let sum = third.clone() + third.clone() + third;
        assert!(sum.is_one());
        let q = Rational::from_ratio(7, 9) / Rational::from_ratio(7, 9);
        assert!(q.is_one());
        assert!((Rational::half() - Rational::half()).is_zero());
    }

    #[test]
    fn float_conversions() {
        assert_eq!(<f64 as Scalar>::half(), 0.5);
        assert_eq!(<f32 as Scalar>::from_ratio(3, 4), 0.75);
        assert_eq!(Rational::from_ratio(3, 8).as_f64(), 0.375);
    }
}
