use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use crate::exact_arith::{parse_rational, rational_to_f64, Rational};

/// Floating-point scalar used by the interior-point method.
pub trait Real:
    Clone
    + Send
    + Sync
    + fmt::Debug
    + PartialOrd
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
    + for<'a> Div<&'a Self, Output = Self>
    + for<'a> AddAssign<&'a Self>
    + for<'a> SubAssign<&'a Self>
{
    fn from_f64(x: f64, prec: u32) -> Self;
    fn from_rational(r: &Rational, prec: u32) -> Self;
    fn to_f64(&self) -> f64;
    /// Decimal expansion carrying the full working precision.
    fn to_decimal(&self) -> String;
    fn sqrt(&self) -> Self;
    fn abs(&self) -> Self;
    fn prec(&self) -> u32;
    /// `self += a * b`.
    fn mul_add_assign(&mut self, a: &Self, b: &Self);

    fn zero(prec: u32) -> Self {
        Self::from_f64(0.0, prec)
    }

    fn one(prec: u32) -> Self {
        Self::from_f64(1.0, prec)
    }

    fn to_rational(&self) -> Rational {
        parse_rational(&self.to_decimal()).expect("finite decimal")
    }
}

impl Real for f64 {
    fn from_f64(x: f64, _prec: u32) -> Self {
        x
    }

    fn from_rational(r: &Rational, _prec: u32) -> Self {
        rational_to_f64(r)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn to_decimal(&self) -> String {
        format!("{:e}", self)
    }

    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }

    fn abs(&self) -> Self {
        f64::abs(*self)
    }

    fn prec(&self) -> u32 {
        53
    }

    fn mul_add_assign(&mut self, a: &Self, b: &Self) {
        *self += a * b;
    }
}

#[cfg(feature = "mpfr")]
mod mpfr {
    use super::*;
    use rug::Float;

    impl Real for Float {
        fn from_f64(x: f64, prec: u32) -> Self {
            Float::with_val(prec, x)
        }

        fn from_rational(r: &Rational, prec: u32) -> Self {
            let num = Float::with_val(
                prec + 64,
                Float::parse(r.numer().to_string()).expect("integer literal"),
            );
            let den = Float::with_val(
                prec + 64,
                Float::parse(r.denom().to_string()).expect("integer literal"),
            );
            Float::with_val(prec, num / den)
        }

        fn to_f64(&self) -> f64 {
            Float::to_f64(self)
        }

        fn to_decimal(&self) -> String {
            let digits = (self.prec() as f64 * std::f64::consts::LOG10_2).ceil() as usize + 2;
            self.to_string_radix(10, Some(digits))
        }

        fn sqrt(&self) -> Self {
            self.clone().sqrt()
        }

        fn abs(&self) -> Self {
            self.clone().abs()
        }

        fn prec(&self) -> u32 {
            Float::prec(self)
        }

        fn mul_add_assign(&mut self, a: &Self, b: &Self) {
            *self += a * b;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_arith::rat;
    use num_traits::Signed;

    #[test]
    fn f64_roundtrip() {
        let x = <f64 as Real>::from_rational(&rat(1, 4), 53);
        assert_eq!(x, 0.25);
        assert_eq!(x.to_rational(), rat(1, 4));
    }

    #[cfg(feature = "mpfr")]
    #[test]
    fn float_precision() {
        let x = <rug::Float as Real>::from_rational(&rat(1, 3), 256);
        let back = x.to_rational();
        let err = (back - rat(1, 3)).abs();
        assert!(err < Rational::new(1.into(), num_traits::pow(num_bigint::BigInt::from(10), 70)));
    }
}
