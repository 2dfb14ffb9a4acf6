//! Exact-arithmetic helpers shared across the crate: small constructors for
//! arbitrary-precision rationals, fixed-point decimal rendering, integer
//! square-root bracketing, and fraction parsing for the CLI.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use thiserror::Error;

/// Shorthand for a `BigInt` from a machine integer.
pub fn big(n: i128) -> BigInt {
    BigInt::from(n)
}

/// Shorthand for an exact rational n/d. Panics if d = 0.
pub fn rat(n: i128, d: i128) -> BigRational {
    BigRational::new(big(n), big(d))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseRationalError {
    #[error("empty input")]
    Empty,
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
    #[error("malformed rational {0:?}")]
    Malformed(String),
}

/// Parses an exact rational from `"a/b"`, a plain integer, or a decimal
/// literal such as `"1.99405"` (read exactly, not via floating point).
pub fn parse_rational(s: &str) -> Result<BigRational, ParseRationalError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(ParseRationalError::Empty);
    }
    let malformed = || ParseRationalError::Malformed(s.to_string());
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num.trim().parse().map_err(|_| malformed())?;
        let d: BigInt = den.trim().parse().map_err(|_| malformed())?;
        if d.is_zero() {
            return Err(ParseRationalError::ZeroDenominator(s.to_string()));
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(malformed());
        }
        let negative = int_part.starts_with('-');
        let int_digits = if int_part.is_empty() || int_part == "-" || int_part == "+" {
            BigInt::zero()
        } else {
            int_part.parse().map_err(|_| malformed())?
        };
        let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
        let frac: BigInt = frac_part.parse().map_err(|_| malformed())?;
        let abs = int_digits.abs() * &scale + frac;
        let signed = if negative { -abs } else { abs };
        return Ok(BigRational::new(signed, scale));
    }
    let n: BigInt = s.parse().map_err(|_| malformed())?;
    Ok(BigRational::from_integer(n))
}

/// Renders an exact rational as a fixed-point decimal with `places` digits
/// after the point, rounding half to even.
pub fn decimal_string(r: &BigRational, places: usize) -> String {
    let negative = r.is_negative();
    let abs = r.abs();
    let scale = BigInt::from(10u32).pow(places as u32);
    let scaled_num = abs.numer() * &scale;
    let (mut q, rem) = scaled_num.div_rem(abs.denom());
    // Half-even on the remainder against den/2.
    let twice: BigInt = &rem * 2;
    let cmp = twice.cmp(abs.denom());
    if cmp == std::cmp::Ordering::Greater
        || (cmp == std::cmp::Ordering::Equal && q.is_odd())
    {
        q += 1;
    }
    let digits = q.to_string();
    let mut out = String::new();
    if negative && !q.is_zero() {
        out.push('-');
    }
    if places == 0 {
        out.push_str(&digits);
        return out;
    }
    if digits.len() > places {
        out.push_str(&digits[..digits.len() - places]);
        out.push('.');
        out.push_str(&digits[digits.len() - places..]);
    } else {
        out.push_str("0.");
        for _ in 0..places - digits.len() {
            out.push('0');
        }
        out.push_str(&digits);
    }
    out
}

/// floor(√n) for a nonnegative big integer.
pub fn isqrt(n: &BigInt) -> BigInt {
    assert!(!n.is_negative(), "isqrt of negative integer");
    n.sqrt()
}

/// floor(a / (b·√c)) for nonnegative integers with b, c > 0.
///
/// Exact: t = floor(a/(b√c)) ⟺ t²b²c ≤ a², so t = isqrt(a² div (b²c)).
pub fn floor_div_sqrt(a: &BigInt, b: &BigInt, c: &BigInt) -> BigInt {
    assert!(!a.is_negative() && b.is_positive() && c.is_positive());
    let num = a * a;
    let den = b * b * c;
    isqrt(&num.div_floor(&den))
}

/// Renders a/(b·√c) as a fixed-point decimal with `places` digits, exact
/// bracketing (truncated toward zero). `c > 0`; `a` may be negative.
pub fn decimal_over_sqrt(a: &BigInt, b: &BigInt, c: &BigInt, places: usize) -> String {
    let negative = a.is_negative() != b.is_negative();
    let scale = BigInt::from(10u32).pow(places as u32);
    let scaled = floor_div_sqrt(&(a.abs() * scale), &b.abs(), c);
    let digits = scaled.to_string();
    let mut out = String::new();
    if negative && !scaled.is_zero() {
        out.push('-');
    }
    if places == 0 {
        out.push_str(&digits);
        return out;
    }
    if digits.len() > places {
        out.push_str(&digits[..digits.len() - places]);
        out.push('.');
        out.push_str(&digits[digits.len() - places..]);
    } else {
        out.push_str("0.");
        for _ in 0..places - digits.len() {
            out.push('0');
        }
        out.push_str(&digits);
    }
    out
}

/// floor(√n) for u128.
pub fn isqrt_u128(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = ((n as f64).sqrt() as u128).min((1u128 << 64) - 1);
    // Float seed can land on either side; settle exactly.
    while x.checked_mul(x).map_or(true, |sq| sq > n) {
        x -= 1;
    }
    while (x + 1).checked_mul(x + 1).map_or(false, |sq| sq <= n) {
        x += 1;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fraction_integer_and_decimal() {
        assert_eq!(parse_rational("59/58").unwrap(), rat(59, 58));
        assert_eq!(parse_rational("-3").unwrap(), rat(-3, 1));
        assert_eq!(parse_rational("1.25").unwrap(), rat(5, 4));
        assert_eq!(parse_rational("-0.5").unwrap(), rat(-1, 2));
        assert_eq!(parse_rational(".5").unwrap(), rat(1, 2));
        assert!(matches!(
            parse_rational("1/0"),
            Err(ParseRationalError::ZeroDenominator(_))
        ));
        assert!(parse_rational("a/b").is_err());
        assert!(parse_rational("1.2.3").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn decimal_rendering_rounds_half_even() {
        // 0.125 -> 0.12 (ties to even), 0.375 -> 0.38
        assert_eq!(decimal_string(&rat(1, 8), 2), "0.12");
        assert_eq!(decimal_string(&rat(3, 8), 2), "0.38");
        assert_eq!(decimal_string(&rat(-1, 8), 2), "-0.12");
        assert_eq!(decimal_string(&rat(5, 4), 3), "1.250");
        assert_eq!(decimal_string(&rat(2, 3), 6), "0.666667");
        assert_eq!(decimal_string(&rat(1, 1), 0), "1");
        assert_eq!(decimal_string(&rat(199405, 100000), 5), "1.99405");
    }

    #[test]
    fn isqrt_brackets_exactly() {
        assert_eq!(isqrt(&big(0)), big(0));
        assert_eq!(isqrt(&big(15)), big(3));
        assert_eq!(isqrt(&big(16)), big(4));
        assert_eq!(isqrt_u128(0), 0);
        assert_eq!(isqrt_u128(3), 1);
        assert_eq!(isqrt_u128(196), 14);
        assert_eq!(isqrt_u128(u128::MAX), (1u128 << 64) - 1);
    }

    #[test]
    fn floor_div_sqrt_matches_f64_reference() {
        // 45 / sqrt(1000) = 1.4230249... -> 6 places floored: 1.423024
        assert_eq!(
            decimal_over_sqrt(&big(45_000_000), &big(1), &big(1000), 0).to_string(),
            "1423024"
        );
        assert_eq!(decimal_over_sqrt(&big(45), &big(1), &big(1000), 6), "1.423024");
        // perfect square: 10 / (2 * sqrt(25)) = 1
        assert_eq!(decimal_over_sqrt(&big(10), &big(2), &big(25), 3), "1.000");
        assert_eq!(decimal_over_sqrt(&big(-45), &big(1), &big(1000), 2), "-1.42");
    }
}
