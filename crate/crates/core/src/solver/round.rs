use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{pow, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::param::AffineParameterization;
use crate::bounds::{Certificate, DualProgram};
use crate::error::{Error, Result};
use crate::exact_arith::{rational_vec, Rational};

/// Nearest multiple of `10^-digits`, ties away from zero.
pub fn round_lambda(values: &[Rational], digits: u32) -> Vec<Rational> {
    let scale = pow(BigInt::from(10), digits as usize);
    values
        .iter()
        .map(|v| {
            let x = v * Rational::from_integer(scale.clone());
            let twice = &x * Rational::from_integer(2.into());
            // floor((2x + sign) / 2) rounds half away from zero
            let k = if x.is_negative() {
                -((-twice + Rational::from_integer(1.into())) / Rational::from_integer(2.into()))
                    .floor()
                    .to_integer()
            } else {
                ((twice + Rational::from_integer(1.into())) / Rational::from_integer(2.into()))
                    .floor()
                    .to_integer()
            };
            Rational::new(k, scale.clone())
        })
        .collect()
}

/// An exact candidate certificate obtained by rounding.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundedCertificate {
    pub digits: u32,
    #[serde(with = "rational_vec")]
    pub lambda: Vec<Rational>,
    /// Full assignment of the program's unknowns.
    #[serde(with = "rational_vec")]
    pub values: Vec<Rational>,
    pub certificate: Certificate,
}

/// Rounds `lambda` to `digits` decimals and rebuilds the certificate from
/// the parameterization, so the linear equations hold exactly.
pub fn round_certificate(
    prog: &DualProgram,
    param: &AffineParameterization,
    lambda: &[Rational],
    digits: u32,
) -> Result<RoundedCertificate> {
    if lambda.len() != param.dimension() {
        return Err(Error::DimensionMismatch(format!(
            "{} parameters for a {}-dimensional parameterization",
            lambda.len(),
            param.dimension()
        )));
    }
    let lambda = round_lambda(lambda, digits);
    let values = param.evaluate(&lambda)?;
    let certificate = prog.assemble(&values)?;
    Ok(RoundedCertificate {
        digits,
        lambda,
        values,
        certificate,
    })
}

/// Smallest decimal precision for which `x` is exact, if any up to `max`.
pub(crate) fn decimal_digits(x: &Rational, max: u32) -> Option<u32> {
    let mut d = x.denom().clone();
    let ten = BigInt::from(10);
    let mut k = 0;
    while !d.is_zero() && d != BigInt::from(1) {
        let g = d.gcd(&ten);
        if g == BigInt::from(1) || k >= max {
            return None;
        }
        d /= g;
        k += 1;
    }
    Some(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_arith::rat;

    #[test]
    fn rounding_rule() {
        let r = round_lambda(&[rat(1, 3), rat(-2, 3), rat(1, 3000), rat(1, 2000)], 3);
        assert_eq!(
            r,
            vec![rat(333, 1000), rat(-667, 1000), rat(0, 1), rat(1, 1000)]
        );
        assert_eq!(round_lambda(&[rat(-1, 2000)], 3), vec![rat(-1, 1000)]);
    }

    #[test]
    fn digits_of_decimal() {
        assert_eq!(decimal_digits(&rat(3, 40), 10), Some(3));
        assert_eq!(decimal_digits(&rat(1, 3), 10), None);
    }
}
