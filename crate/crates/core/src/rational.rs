//! Exact rationals used for metric coefficients, eigenvalues, arc centers and periods.
//!
//! Values are `num_rational::Rational64`, which is always kept in lowest terms
//! with a positive denominator. The text form is `p/q` (or `p` when `q = 1`).

use crate::error::{Error, Result};
use num_traits::{Signed, ToPrimitive, Zero};

pub type Rational = num_rational::Rational64;

/// Parses `p/q`, `p`, or a terminating decimal such as `0.75`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::arg("empty rational"));
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: i64 = n.trim().parse().map_err(|_| Error::arg(format!("bad numerator in {s:?}")))?;
        let d: i64 = d.trim().parse().map_err(|_| Error::arg(format!("bad denominator in {s:?}")))?;
        if d == 0 {
            return Err(Error::arg(format!("zero denominator in {s:?}")));
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) || frac.len() > 15 {
            return Err(Error::arg(format!("bad decimal {s:?}")));
        }
        let neg = int.trim_start().starts_with('-');
        let int: i64 = if int.is_empty() || int == "-" { 0 } else {
            int.parse().map_err(|_| Error::arg(format!("bad decimal {s:?}")))?
        };
        let scale = 10i64.pow(frac.len() as u32);
        let f: i64 = frac.parse().map_err(|_| Error::arg(format!("bad decimal {s:?}")))?;
        let mag = int.abs() * scale + f;
        return Ok(Rational::new(if neg { -mag } else { mag }, scale));
    }
    let n: i64 = s.parse().map_err(|_| Error::arg(format!("bad rational {s:?}")))?;
    Ok(Rational::from_integer(n))
}

pub fn format_rational(r: &Rational) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn is_positive(r: &Rational) -> bool {
    !r.is_zero() && r.is_positive()
}

/// Serde adapter storing a [`Rational`] as its `p/q` string.
pub mod serde_str {
    use super::{format_rational, parse_rational, Rational};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for `Vec<Rational>`.
pub mod serde_vec {
    use super::{format_rational, parse_rational, Rational};
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(format_rational).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|s| parse_rational(s).map_err(serde::de::Error::custom))
            .collect()
    }
}
