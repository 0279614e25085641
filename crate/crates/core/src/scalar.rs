//! Numeric values used by the finite-system algorithms.
//!
//! Everything in this crate is generic over [`Scalar`], which is implemented for
//! exact rationals ([`Rational`]) and for `f64`. Exact arithmetic is the default for
//! decisions (invariance, extreme points, oracle equivalence); `f64` is used for
//! large grid systems where the weights are transcendental anyway.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::ParseError;

/// Arbitrary precision rational.
pub type Rational = BigRational;

/// A field element usable by the graph algorithms.
pub trait Scalar:
    Clone
    + PartialOrd
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// `true` when arithmetic is exact and comparisons need no tolerance.
    const EXACT: bool;

    fn from_int(v: i64) -> Self;

    fn to_f64(&self) -> f64;

    /// Smallest improvement an iterative solver treats as a real change.
    /// Zero for exact types.
    fn resolution() -> Self;

    fn abs_val(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    fn max_val(a: Self, b: Self) -> Self {
        if b > a {
            b
        } else {
            a
        }
    }

    fn min_val(a: Self, b: Self) -> Self {
        if b < a {
            b
        } else {
            a
        }
    }

    /// Equality up to [`Scalar::resolution`].
    fn approx_eq(&self, other: &Self) -> bool {
        (self.clone() - other.clone()).abs_val() <= Self::resolution()
    }

    /// Parses either a `p/q` rational string or a decimal literal.
    fn parse_value(s: &str) -> Result<Self, ParseError>;
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_int(v: i64) -> Self {
        v as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn resolution() -> Self {
        1e-10
    }

    fn parse_value(s: &str) -> Result<Self, ParseError> {
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            let p: f64 = p.trim().parse().map_err(|_| ParseError::number(s))?;
            let q: f64 = q.trim().parse().map_err(|_| ParseError::number(s))?;
            if q == 0.0 {
                return Err(ParseError::number(s));
            }
            return Ok(p / q);
        }
        let v: f64 = s.parse().map_err(|_| ParseError::number(s))?;
        if !v.is_finite() {
            return Err(ParseError::number(s));
        }
        Ok(v)
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_int(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn resolution() -> Self {
        Rational::zero()
    }

    fn abs_val(&self) -> Self {
        self.abs()
    }

    fn approx_eq(&self, other: &Self) -> bool {
        self == other
    }

    fn parse_value(s: &str) -> Result<Self, ParseError> {
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            let p = BigInt::from_str(p.trim()).map_err(|_| ParseError::number(s))?;
            let q = BigInt::from_str(q.trim()).map_err(|_| ParseError::number(s))?;
            if q.is_zero() {
                return Err(ParseError::number(s));
            }
            return Ok(Rational::new(p, q));
        }
        // Decimals are read as binary floating point, then converted exactly.
        let v: f64 = s.parse().map_err(|_| ParseError::number(s))?;
        Rational::from_float(v).ok_or_else(|| ParseError::number(s))
    }
}

/// Shorthand for `p/q` as an exact rational.
pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Formats a rational as `p/q`, or `p` when integral.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// A real number or negative infinity.
///
/// The derived ordering puts `NegInf` below every finite value.
#[derive(Clone, Debug, PartialEq, PartialOrd)]
pub enum ExtendedReal<T> {
    NegInf,
    Finite(T),
}

impl<T: Scalar> ExtendedReal<T> {
    pub fn is_finite(&self) -> bool {
        matches!(self, ExtendedReal::Finite(_))
    }

    pub fn finite(&self) -> Option<&T> {
        match self {
            ExtendedReal::Finite(v) => Some(v),
            ExtendedReal::NegInf => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            ExtendedReal::Finite(v) => v.to_f64(),
            ExtendedReal::NegInf => f64::NEG_INFINITY,
        }
    }

    pub fn cmp_total(&self, other: &Self) -> Ordering {
        self.partial_cmp(other).unwrap_or(Ordering::Equal)
    }
}

impl<T: fmt::Display> fmt::Display for ExtendedReal<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedReal::NegInf => write!(f, "-inf"),
            ExtendedReal::Finite(v) => write!(f, "{v}"),
        }
    }
}

/// Renders a scalar for text output: rationals as `p/q`, floats with full precision.
pub fn render<T: Scalar>(v: &T) -> String {
    if T::EXACT {
        // Display for BigRational already prints `p/q` or `p`.
        v.to_string()
    } else {
        format!("{:.17}", v.to_f64())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rational_and_decimal() {
        assert_eq!(Rational::parse_value("3/4").unwrap(), ratio(3, 4));
        assert_eq!(Rational::parse_value(" -2 ").unwrap(), ratio(-2, 1));
        assert_eq!(Rational::parse_value("0.5").unwrap(), ratio(1, 2));
        assert!(Rational::parse_value("1/0").is_err());
        assert!(Rational::parse_value("abc").is_err());
        assert_eq!(f64::parse_value("1/4").unwrap(), 0.25);
        assert!(f64::parse_value("inf").is_err());
    }

    #[test]
    fn neg_inf_below_everything() {
        let a: ExtendedReal<Rational> = ExtendedReal::NegInf;
        let b = ExtendedReal::Finite(ratio(-1_000_000, 1));
        assert!(a < b);
        assert_eq!(a.to_string(), "-inf");
    }

    #[test]
    fn rational_formatting() {
        assert_eq!(format_rational(&ratio(6, 4)), "3/2");
        assert_eq!(format_rational(&ratio(4, 2)), "2");
        assert_eq!(render(&ratio(1, 3)), "1/3");
    }
}
