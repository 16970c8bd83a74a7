//! Exact rational helpers shared by the solver and the I/O layer.

use num_rational::Ratio;
use num_traits::{One, Zero};
use thiserror::Error;

pub type Rational = Ratio<i128>;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("cannot parse `{0}` as a rational number")]
pub struct ParseRationalError(pub String);

/// Parses `p`, `p/q`, or a decimal literal such as `1.25` or `3e-2`.
pub fn parse_rational(text: &str) -> Result<Rational, ParseRationalError> {
    let err = || ParseRationalError(text.to_string());
    let s = text.trim();
    if s.is_empty() {
        return Err(err());
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: i128 = p.trim().parse().map_err(|_| err())?;
        let q: i128 = q.trim().parse().map_err(|_| err())?;
        if q == 0 {
            return Err(err());
        }
        return Ok(Rational::new(p, q));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let e: i32 = s[pos + 1..].parse().map_err(|_| err())?;
            (&s[..pos], e)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(err());
    }
    let all_digits = format!("{int_part}{frac_part}");
    let numer: i128 = if all_digits.is_empty() {
        0
    } else {
        all_digits.parse().map_err(|_| err())?
    };
    let scale = exponent - frac_part.len() as i32;
    let ten = |k: u32| 10i128.checked_pow(k).ok_or_else(err);
    let mut value = if scale >= 0 {
        Rational::from_integer(numer.checked_mul(ten(scale as u32)?).ok_or_else(err)?)
    } else {
        Rational::new(numer, ten((-scale) as u32)?)
    };
    if negative {
        value = -value;
    }
    Ok(value)
}

/// Formats as `p` for integers and `p/q` otherwise.
pub fn format_rational(value: &Rational) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// `ceil(value)` for a positive rational.
pub fn ceil_positive(value: &Rational) -> u64 {
    debug_assert!(*value > Rational::zero());
    value.ceil().to_integer() as u64
}

pub mod serde_str {
    //! Serializes a [`Rational`] as a `"p/q"` string.
    use super::{format_rational, parse_rational, Rational};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &Rational, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&format_rational(value))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(de)?;
        parse_rational(&text).map_err(serde::de::Error::custom)
    }
}
