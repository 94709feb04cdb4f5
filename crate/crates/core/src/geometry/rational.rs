//! Helpers around [`BigRational`], the coordinate and coefficient type used everywhere.

use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn checked_div(a: &Rational, b: &Rational) -> Result<Rational> {
    if b.is_zero() {
        return Err(Error::DivisionByZero);
    }
    Ok(a / b)
}

/// Parses `"p/q"` or `"p"`; rejects a zero denominator instead of panicking.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid rational {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(BigInt::from_str(s).map_err(|_| bad())?)),
    }
}

pub fn floor_div(n: &BigInt, d: &BigInt) -> BigInt {
    n.div_floor(d)
}

pub fn ceil_div(n: &BigInt, d: &BigInt) -> BigInt {
    -((-n).div_floor(d))
}

/// Smallest integer `t >= 0` with `t^2 >= x`, i.e. `ceil(sqrt(x))` for `x >= 0`.
pub fn ceil_sqrt(x: &Rational) -> Result<BigInt> {
    if x.is_negative() {
        return Err(Error::Domain("square root of a negative rational".into()));
    }
    let floor = x.floor().to_integer();
    let floor = floor.magnitude();
    let mut t = BigInt::from(floor.sqrt());
    while Rational::from_integer(&t * &t) < *x {
        t += 1;
    }
    while t > BigInt::zero() {
        let s = &t - 1;
        if Rational::from_integer(&s * &s) >= *x {
            t = s;
        } else {
            break;
        }
    }
    Ok(t)
}

/// Largest integer `t` with `t^2 <= x`.
pub fn floor_sqrt(x: &Rational) -> Result<BigInt> {
    if x.is_negative() {
        return Err(Error::Domain("square root of a negative rational".into()));
    }
    let floor = x.floor().to_integer();
    Ok(BigInt::from(floor.magnitude().sqrt()))
}

pub fn is_perfect_square(n: &BigUint) -> bool {
    let r = n.sqrt();
    &r * &r == *n
}

/// `floor(x * 2^bits) / 2^bits`.
pub fn dyadic_floor(x: &Rational, bits: u32) -> Rational {
    let scale = BigInt::one() << bits;
    let n = floor_div(&(x.numer() * &scale), x.denom());
    Rational::new(n, scale)
}

/// `ceil(x * 2^bits) / 2^bits`.
pub fn dyadic_ceil(x: &Rational, bits: u32) -> Rational {
    let scale = BigInt::one() << bits;
    let n = ceil_div(&(x.numer() * &scale), x.denom());
    Rational::new(n, scale)
}

pub fn to_f64(x: &Rational) -> f64 {
    // Good to ~53 bits for display purposes; never used in decisions.
    let shift = 64u32;
    let scaled = floor_div(&(x.numer() << shift), x.denom());
    let (sign, mag) = scaled.into_parts();
    let v = mag
        .to_u64_digits()
        .iter()
        .rev()
        .fold(0.0f64, |acc, &d| acc * 18446744073709551616.0 + d as f64);
    let v = v / 2f64.powi(shift as i32);
    if sign == Sign::Minus {
        -v
    } else {
        v
    }
}

pub fn pow(x: &Rational, e: u32) -> Rational {
    let mut out = Rational::one();
    for _ in 0..e {
        out *= x;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_reduces() {
        assert_eq!(parse_rational("6/4").unwrap(), ratio(3, 2));
        assert_eq!(parse_rational("-7").unwrap(), rat(-7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn integer_square_roots() {
        assert_eq!(ceil_sqrt(&rat(16)).unwrap(), BigInt::from(4));
        assert_eq!(ceil_sqrt(&rat(17)).unwrap(), BigInt::from(5));
        assert_eq!(ceil_sqrt(&ratio(1, 4)).unwrap(), BigInt::from(1));
        assert_eq!(ceil_sqrt(&rat(0)).unwrap(), BigInt::from(0));
        assert_eq!(floor_sqrt(&ratio(99, 4)).unwrap(), BigInt::from(4));
        assert!(ceil_sqrt(&rat(-1)).is_err());
    }

    #[test]
    fn dyadic_rounding_brackets() {
        let x = ratio(1, 3);
        let lo = dyadic_floor(&x, 10);
        let hi = dyadic_ceil(&x, 10);
        assert!(lo < x && x < hi);
        assert_eq!(&hi - &lo, ratio(1, 1024));
        assert_eq!(dyadic_floor(&ratio(-1, 3), 2), ratio(-1, 2));
    }

    #[test]
    fn float_display_conversion() {
        assert!((to_f64(&ratio(1, 3)) - 1.0 / 3.0).abs() < 1e-15);
        assert!((to_f64(&ratio(-5, 2)) + 2.5).abs() < 1e-15);
    }
}
