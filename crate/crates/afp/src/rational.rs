//! Exact rational scalars and their `"p/q"` string form.
//!
//! All user-facing encodings (config files, reports, vector entries) carry
//! rationals as strings like `"3/4"` or `"-2"` so that values round-trip
//! byte-for-byte regardless of magnitude.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serializer};
use std::str::FromStr;

pub type Rational = BigRational;

/// Shorthand for `num/den` from machine integers. Panics if `den == 0`.
pub fn rat(num: i64, den: i64) -> Rational {
    assert!(den != 0, "rational with zero denominator");
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational literal {input:?}: {reason}")]
pub struct ParseRationalError {
    pub input: String,
    pub reason: String,
}

/// Parses `"p"` or `"p/q"` with optional sign and surrounding whitespace.
pub fn parse_rational(s: &str) -> Result<Rational, ParseRationalError> {
    let err = |reason: &str| ParseRationalError {
        input: s.to_string(),
        reason: reason.to_string(),
    };
    let trimmed = s.trim();
    if trimmed.is_empty() {
        return Err(err("empty string"));
    }
    let (num_str, den_str) = match trimmed.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (trimmed, "1"),
    };
    let num = BigInt::from_str(num_str).map_err(|_| err("numerator is not an integer"))?;
    let den = BigInt::from_str(den_str).map_err(|_| err("denominator is not an integer"))?;
    if den.is_zero() {
        return Err(err("denominator is zero"));
    }
    Ok(Rational::new(num, den))
}

/// Canonical string form: lowest terms, positive denominator, no spaces.
/// Integers print without the `/1` suffix.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Lossy view for human-oriented output only; never feeds back into the math.
pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Serde adapter serializing a [`Rational`] as its canonical string.
///
/// Use as `#[serde(with = "afp::rational::serde_rational")]`.
pub mod serde_rational {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(de)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// Same adapter for `Option<Rational>` fields.
pub mod serde_rational_opt {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Option<Rational>, ser: S) -> Result<S::Ok, S::Error> {
        match r {
            Some(r) => ser.serialize_some(&format_rational(r)),
            None => ser.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Option<Rational>, D::Error> {
        let s = Option::<String>::deserialize(de)?;
        s.map(|s| parse_rational(&s).map_err(serde::de::Error::custom))
            .transpose()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_integers_and_fractions() {
        assert_eq!(parse_rational("3").unwrap(), rat_int(3));
        assert_eq!(parse_rational("-3").unwrap(), rat_int(-3));
        assert_eq!(parse_rational("3/4").unwrap(), rat(3, 4));
        assert_eq!(parse_rational(" -6/8 ").unwrap(), rat(-3, 4));
        assert_eq!(parse_rational("6/-8").unwrap(), rat(-3, 4));
    }

    #[test]
    fn rejects_garbage() {
        for bad in ["", "x", "1/0", "1/", "/2", "1.5", "1/2/3"] {
            assert!(parse_rational(bad).is_err(), "accepted {bad:?}");
        }
    }

    #[test]
    fn canonical_form_round_trips() {
        for s in ["0", "1", "-1", "3/4", "-3/4", "22/7", "1000000000000000000000/7"] {
            let r = parse_rational(s).unwrap();
            assert_eq!(format_rational(&r), s);
            assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
        }
    }

    #[test]
    fn formats_reduce() {
        assert_eq!(format_rational(&rat(6, 8)), "3/4");
        assert_eq!(format_rational(&rat(-6, -8)), "3/4");
        assert_eq!(format_rational(&rat(8, 4)), "2");
    }
}
