//! Parsers for rational literals and index ranges.

use std::str::FromStr;

use matbeta::Rational;
use num_bigint::BigInt;
use num_traits::{One, Pow, Zero};

use crate::error::CliError;

/// Accepts `p/q`, integers, and decimals with an optional exponent
/// (`1.25`, `5e-1`); decimals are converted exactly.
pub fn parse_rational(s: &str) -> Result<Rational, CliError> {
    let s = s.trim();
    let malformed =
        || CliError::Usage(format!("malformed number {s:?}: expected p/q or a decimal"));
    if s.is_empty() {
        return Err(malformed());
    }
    if s.contains('/') {
        let (num, den) = s.split_once('/').ok_or_else(malformed)?;
        let num = BigInt::from_str(num.trim()).map_err(|_| malformed())?;
        let den = BigInt::from_str(den.trim()).map_err(|_| malformed())?;
        if den.is_zero() {
            return Err(CliError::Usage(format!("zero denominator in {s:?}")));
        }
        return Ok(Rational::new(num, den));
    }
    parse_decimal(s).ok_or_else(malformed)
}

fn parse_decimal(s: &str) -> Option<Rational> {
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.as_bytes().first()? {
        b'-' => (true, &mantissa[1..]),
        b'+' => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part
        .bytes()
        .chain(frac_part.bytes())
        .all(|b| b.is_ascii_digit())
    {
        return None;
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut value = Rational::from_integer(BigInt::from_str(&all_digits).ok()?);
    let scale = exponent.checked_sub(i32::try_from(frac_part.len()).ok()?)?;
    let ten = Rational::from_integer(BigInt::from(10));
    if scale.unsigned_abs() > 10_000 {
        return None;
    }
    let factor: Rational = Pow::pow(&ten, scale.unsigned_abs());
    value = if scale >= 0 {
        value * factor
    } else {
        value / factor
    };
    Some(if negative { -value } else { value })
}

/// Index set: comma-separated items, each `n`, `a..b` (inclusive) or
/// `a..b:step`. `a > b` yields no values; an empty string is the empty set.
/// Duplicates are kept in the given order.
pub fn parse_range(s: &str) -> Result<Vec<u32>, CliError> {
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim).filter(|i| !i.is_empty()) {
        let bad = || {
            CliError::Usage(format!(
                "malformed range item {item:?}: expected n, a..b or a..b:step"
            ))
        };
        let Some((lo, rest)) = item.split_once("..") else {
            out.push(item.parse().map_err(|_| bad())?);
            continue;
        };
        let (hi, step) = match rest.split_once(':') {
            Some((hi, step)) => (hi, step.parse::<u32>().map_err(|_| bad())?),
            None => (rest, 1),
        };
        if step == 0 {
            return Err(CliError::Usage(format!(
                "range step must be positive in {item:?}"
            )));
        }
        let lo: u32 = lo.parse().map_err(|_| bad())?;
        let hi: u32 = hi.parse().map_err(|_| bad())?;
        out.extend((lo..=hi).step_by(step as usize));
    }
    Ok(out)
}

/// `alpha` or `beta` must exceed 1/2; checked here so the message can name
/// the flag.
pub fn check_shape(name: &str, v: &Rational) -> Result<(), CliError> {
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    if *v > half {
        Ok(())
    } else {
        Err(CliError::Usage(format!(
            "{name} must be greater than 1/2 (got {v})"
        )))
    }
}
