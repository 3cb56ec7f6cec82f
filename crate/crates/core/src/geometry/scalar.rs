//! Exact scalar arithmetic.
//!
//! All geometric data in this crate is held as arbitrary-precision rationals.
//! `num_rational::BigRational` already maintains the invariants we need:
//! values are stored in lowest terms with a positive denominator. Binary
//! floating-point inputs are dyadic rationals, so conversion from `f64` is
//! exact and the whole pipeline from trained weights to cell counts never
//! rounds.

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Scalar = BigRational;

/// Exact conversion from a binary float. Fails only on NaN/infinity.
pub fn scalar_from_f64(x: f64) -> Result<Scalar> {
    BigRational::from_float(x).ok_or_else(|| Error::Parse(format!("non-finite float {x}")))
}

pub fn scalar_to_f64(x: &Scalar) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

pub fn scalar_int(n: i64) -> Scalar {
    BigRational::from_integer(BigInt::from(n))
}

pub fn scalar_ratio(num: i64, den: i64) -> Scalar {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses a decimal string (`-12`, `3.25`, `1e-3`, `2.5e2`) exactly as a
/// rational. A `p/q` fraction form is accepted as well.
pub fn parse_scalar(s: &str) -> Result<Scalar> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty number".into()));
    }
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad numerator in {s:?}")))?;
        let d: BigInt = den
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(BigRational::new(n, d));
    }
    let (mantissa, exp10) = match s.split_once(['e', 'E']) {
        Some((m, e)) => {
            let e: i64 = e
                .parse()
                .map_err(|_| Error::Parse(format!("bad exponent in {s:?}")))?;
            (m, e)
        }
        None => (s, 0),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    let negative = int_part.starts_with('-');
    let int_digits = int_part.trim_start_matches(['+', '-']);
    if (int_digits.is_empty() && frac_part.is_empty())
        || !int_digits.chars().all(|c| c.is_ascii_digit())
        || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return Err(Error::Parse(format!("bad decimal {s:?}")));
    }
    let digits = format!("{int_digits}{frac_part}");
    let mut num: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits
            .parse()
            .map_err(|_| Error::Parse(format!("bad decimal {s:?}")))?
    };
    if negative {
        num = -num;
    }
    let shift = exp10 - frac_part.len() as i64;
    let pow10 = BigInt::from(10u32).pow(shift.unsigned_abs() as u32);
    Ok(if shift >= 0 {
        BigRational::from_integer(num * pow10)
    } else {
        BigRational::new(num, pow10)
    })
}

/// Renders a scalar as an exact decimal when the denominator is 2^a·5^b,
/// falling back to `p/q` otherwise. Round-trips through [`parse_scalar`].
pub fn format_scalar(x: &Scalar) -> String {
    let (mut den, mut twos, mut fives) = (x.denom().clone(), 0u32, 0u32);
    let two = BigInt::from(2u32);
    let five = BigInt::from(5u32);
    while (&den % &two).is_zero() {
        den /= &two;
        twos += 1;
    }
    while (&den % &five).is_zero() {
        den /= &five;
        fives += 1;
    }
    if !den.is_one() {
        return format!("{}/{}", x.numer(), x.denom());
    }
    // scale numerator so the denominator becomes 10^k
    let k = twos.max(fives);
    let scale = two.pow(k - twos) * five.pow(k - fives);
    let scaled = x.numer() * scale;
    if k == 0 {
        return scaled.to_string();
    }
    let neg = scaled.sign() == Sign::Minus;
    let digits = scaled.magnitude().to_string();
    let digits = if digits.len() <= k as usize {
        format!("{}{}", "0".repeat(k as usize + 1 - digits.len()), digits)
    } else {
        digits
    };
    let split = digits.len() - k as usize;
    let (ip, fp) = digits.split_at(split);
    let fp = fp.trim_end_matches('0');
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    out.push_str(ip);
    if !fp.is_empty() {
        out.push('.');
        out.push_str(fp);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_decimals_exactly() {
        assert_eq!(parse_scalar("0.5").unwrap(), scalar_ratio(1, 2));
        assert_eq!(parse_scalar("-2.75").unwrap(), scalar_ratio(-11, 4));
        assert_eq!(parse_scalar("3").unwrap(), scalar_int(3));
        assert_eq!(parse_scalar("1e-3").unwrap(), scalar_ratio(1, 1000));
        assert_eq!(parse_scalar("2.5e2").unwrap(), scalar_int(250));
        assert_eq!(parse_scalar("-1/3").unwrap(), scalar_ratio(-1, 3));
        assert_eq!(parse_scalar(".25").unwrap(), scalar_ratio(1, 4));
        assert!(parse_scalar("abc").is_err());
        assert!(parse_scalar("").is_err());
        assert!(parse_scalar("1/0").is_err());
    }

    #[test]
    fn float_conversion_is_exact() {
        // 0.1 is not 1/10 in binary; the conversion must preserve the bits.
        let x = scalar_from_f64(0.1).unwrap();
        assert_ne!(x, scalar_ratio(1, 10));
        assert_eq!(scalar_to_f64(&x), 0.1);
        assert_eq!(scalar_from_f64(0.5).unwrap(), scalar_ratio(1, 2));
        assert!(scalar_from_f64(f64::NAN).is_err());
    }

    #[test]
    fn format_round_trips() {
        for s in ["0", "1", "-0.5", "2.75", "1/3", "-7/12", "100", "0.001"] {
            let x = parse_scalar(s).unwrap();
            assert_eq!(parse_scalar(&format_scalar(&x)).unwrap(), x);
        }
        assert_eq!(format_scalar(&scalar_ratio(-11, 4)), "-2.75");
        assert_eq!(format_scalar(&scalar_ratio(1, 3)), "1/3");
    }
}
