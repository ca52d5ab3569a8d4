//! The exact scalar type and its textual form.
//!
//! Every volume ratio in the core is a [`Scalar`]: an arbitrary-precision
//! rational kept in canonical reduced form with a positive denominator
//! (`num_rational::BigRational` maintains both on construction). Documents
//! serialize scalars as decimal-free `"p/q"` strings; `"p"` is accepted and
//! emitted when the denominator is one.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub type Scalar = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarParseError {
    #[error("empty rational literal")]
    Empty,
    #[error("invalid rational literal {0:?}")]
    Invalid(String),
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
}

/// Scalar from an integer.
pub fn scalar(n: i64) -> Scalar {
    BigRational::from_integer(BigInt::from(n))
}

/// Scalar from a numerator/denominator pair. Panics on a zero denominator;
/// use [`parse_scalar`] for untrusted input.
pub fn ratio(num: i64, den: i64) -> Scalar {
    assert!(den != 0, "zero denominator");
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses a decimal-free rational literal: `p`, `-p`, or `p/q`.
pub fn parse_scalar(text: &str) -> Result<Scalar, ScalarParseError> {
    let text = text.trim();
    if text.is_empty() {
        return Err(ScalarParseError::Empty);
    }
    let bad = || ScalarParseError::Invalid(text.to_owned());
    match text.split_once('/') {
        None => text.parse::<BigInt>().map(BigRational::from_integer).map_err(|_| bad()),
        Some((num, den)) => {
            let num = num.trim().parse::<BigInt>().map_err(|_| bad())?;
            let den = den.trim().parse::<BigInt>().map_err(|_| bad())?;
            if den.is_zero() {
                return Err(ScalarParseError::ZeroDenominator(text.to_owned()));
            }
            Ok(BigRational::new(num, den))
        }
    }
}

/// Canonical textual form: `p` when the denominator is one, else `p/q`.
pub fn format_scalar(value: &Scalar) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// Nearest f64, for display and rendering only.
pub fn scalar_to_f64(value: &Scalar) -> f64 {
    value.to_f64().unwrap_or_else(|| {
        // Fall back to a quotient of approximations for out-of-range parts.
        let n = value.numer().to_f64().unwrap_or(f64::MAX * value.numer().signum().to_f64().unwrap_or(1.0));
        let d = value.denom().to_f64().unwrap_or(f64::MAX);
        n / d
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for text in ["0", "7", "-3", "1/2", "-22/7"] {
            let v = parse_scalar(text).unwrap();
            assert_eq!(format_scalar(&v), text);
        }
    }

    #[test]
    fn parse_reduces_to_canonical_form() {
        assert_eq!(format_scalar(&parse_scalar("4/8").unwrap()), "1/2");
        assert_eq!(format_scalar(&parse_scalar("3/-6").unwrap()), "-1/2");
        assert_eq!(format_scalar(&parse_scalar("-0/5").unwrap()), "0");
    }

    #[test]
    fn parse_rejects_bad_literals() {
        assert!(matches!(parse_scalar("1/0"), Err(ScalarParseError::ZeroDenominator(_))));
        assert!(parse_scalar("0.5").is_err());
        assert!(parse_scalar("").is_err());
        assert!(parse_scalar("a/b").is_err());
    }
}
