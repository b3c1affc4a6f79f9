//! Exact rational carrier and conversions.
//!
//! `BigRational` normalizes after every operation, which keeps the massive
//! cancellations in cumulant sums exact.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(v: impl Into<BigInt>) -> Rational {
    Rational::from_integer(v.into())
}

pub fn rat_uint(v: &BigUint) -> Rational {
    Rational::from_integer(BigInt::from(v.clone()))
}

/// `p/q` form, always with an explicit denominator.
pub fn to_pq(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse_pq(s: &str) -> Result<Rational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num
        .parse()
        .map_err(|_| Error::parse(format!("bad rational numerator in {s:?}")))?;
    let den: BigInt = den
        .parse()
        .map_err(|_| Error::parse(format!("bad rational denominator in {s:?}")))?;
    if den.is_zero() {
        return Err(Error::parse(format!("zero denominator in {s:?}")));
    }
    Ok(Rational::new(num, den))
}

/// Nearest `f64`, accurate for numerators and denominators far beyond the
/// `f64` exponent range.
pub fn to_f64(r: &Rational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && n.abs() < 9.0e15 && d < 9.0e15 {
            return n / d;
        }
    }
    let neg = r.is_negative();
    let num = r.numer().abs().to_biguint().expect("abs is nonnegative");
    let den = r.denom().to_biguint().expect("denominator is positive");
    // Scale so the integer quotient carries 64+ significant bits.
    let shift = den.bits() as i64 - num.bits() as i64 + 66;
    let q = if shift >= 0 {
        (num << shift as usize) / &den
    } else {
        num / (den << (-shift) as usize)
    };
    let top = q.bits() as i64;
    let drop = (top - 64).max(0);
    let mantissa = (&q >> drop as usize).to_u64().expect("fits in 64 bits") as f64;
    let v = mantissa * 2f64.powi((drop - shift) as i32);
    if neg {
        -v
    } else {
        v
    }
}

pub fn pow_rat(base: &Rational, exp: u32) -> Rational {
    num_traits::pow(base.clone(), exp as usize)
}

pub fn one() -> Rational {
    Rational::one()
}

pub fn zero() -> Rational {
    Rational::zero()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pq_round_trip() {
        let r = rat(-6, 8);
        assert_eq!(to_pq(&r), "-3/4");
        assert_eq!(parse_pq("-3/4").unwrap(), r);
        assert_eq!(parse_pq("5").unwrap(), rat(5, 1));
        assert_eq!(to_pq(&rat(5, 1)), "5/1");
        assert!(parse_pq("1/0").is_err());
    }

    #[test]
    fn to_f64_handles_huge_operands() {
        let big = BigInt::from(3u8).pow(2000);
        let r = Rational::new(big.clone() + 1, big * 4);
        assert!((to_f64(&r) - 0.25).abs() < 1e-15);
        let tiny = Rational::new(BigInt::one(), BigInt::from(10u8).pow(400));
        assert_eq!(to_f64(&tiny), 0.0);
        assert!((to_f64(&rat(-1, 3)) + 1.0 / 3.0).abs() < 1e-16);
    }
}
