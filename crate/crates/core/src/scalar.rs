//! Exact rationals.
//!
//! `BigRational` keeps numerator and denominator reduced with a positive
//! denominator after every operation, so equality is structural.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Scalar = BigRational;

pub fn int(n: i64) -> Scalar {
    Scalar::from_integer(BigInt::from(n))
}

pub fn frac(num: i64, den: i64) -> Scalar {
    Scalar::new(BigInt::from(num), BigInt::from(den))
}

pub fn zero() -> Scalar {
    Scalar::zero()
}

pub fn one() -> Scalar {
    Scalar::one()
}

/// Always `num/den`, including integers (`3/1`), so the wire format has a
/// single shape.
pub fn format_scalar(s: &Scalar) -> String {
    format!("{}/{}", s.numer(), s.denom())
}

/// Short human form: `3`, `-1/2`.
pub fn display_scalar(s: &Scalar) -> String {
    if s.is_integer() {
        s.numer().to_string()
    } else {
        format!("{}/{}", s.numer(), s.denom())
    }
}

/// Accepts `n` or `n/d` with `d != 0`.
pub fn parse_scalar(text: &str) -> Result<Scalar> {
    let bad = || Error::BadScalar(text.to_string());
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text.trim(), "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(Scalar::new(num, den))
}

pub fn is_reduced(s: &Scalar) -> bool {
    use num_integer::Integer;
    s.denom().is_positive() && s.numer().gcd(s.denom()).is_one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn format_and_parse() {
        assert_eq!(format_scalar(&frac(6, -4)), "-3/2");
        assert_eq!(format_scalar(&int(5)), "5/1");
        assert_eq!(parse_scalar("-3/2").unwrap(), frac(-3, 2));
        assert_eq!(parse_scalar("7").unwrap(), int(7));
        assert!(parse_scalar("1/0").is_err());
        assert!(parse_scalar("x").is_err());
    }

    #[test]
    fn reduction_invariant() {
        let s = frac(10, -4);
        assert!(is_reduced(&s));
        assert_eq!(s.denom(), &BigInt::from(2));
        assert_eq!(&s * s.recip(), one());
    }
}
