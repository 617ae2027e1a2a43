//! Number types the decomposition engine runs over.
//!
//! Exact mode uses [`Exact`] (arbitrary-precision rationals, always in lowest
//! terms with a positive denominator). Float mode runs the same code over
//! `f64` and treats values within a relative tolerance as equal.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::ParseError;

/// Exact rational scalar. Arithmetic never rounds.
pub type Exact = BigRational;

/// Relative tolerance used by float mode unless overridden.
pub const DEFAULT_FLOAT_TOLERANCE: f64 = 1e-9;

/// Ordered field operations shared by exact and float mode.
pub trait Scalar:
    Clone
    + PartialEq
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
    + 'static
{
    /// Tolerance applied by comparisons when the caller does not pick one.
    /// Zero for exact types.
    const DEFAULT_TOLERANCE: f64;

    fn from_exact(value: &Exact) -> Self;
    fn to_exact(&self) -> Exact;
    fn to_f64(&self) -> f64;

    fn from_usize(n: usize) -> Self {
        Self::from_exact(&Exact::from_integer(BigInt::from(n)))
    }

    fn abs_value(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    /// Sign of `self`, where magnitudes up to `rel_tol * |scale|` count as zero.
    /// Exact types ignore the tolerance.
    fn sign_within(&self, scale: &Self, rel_tol: f64) -> Ordering;

    fn half(&self) -> Self {
        self.clone() / (Self::one() + Self::one())
    }
}

impl Scalar for BigRational {
    const DEFAULT_TOLERANCE: f64 = 0.0;

    fn from_exact(value: &Exact) -> Self {
        value.clone()
    }

    fn to_exact(&self) -> Exact {
        self.clone()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn abs_value(&self) -> Self {
        self.abs()
    }

    fn sign_within(&self, _scale: &Self, _rel_tol: f64) -> Ordering {
        if self.is_zero() {
            Ordering::Equal
        } else if self.is_positive() {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    }
}

impl Scalar for f64 {
    const DEFAULT_TOLERANCE: f64 = DEFAULT_FLOAT_TOLERANCE;

    fn from_exact(value: &Exact) -> Self {
        ToPrimitive::to_f64(value).unwrap_or(f64::NAN)
    }

    fn to_exact(&self) -> Exact {
        BigRational::from_float(*self).unwrap_or_else(Exact::zero)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn abs_value(&self) -> Self {
        self.abs()
    }

    fn sign_within(&self, scale: &Self, rel_tol: f64) -> Ordering {
        if self.abs() <= rel_tol * scale.abs() {
            Ordering::Equal
        } else if *self > 0.0 {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    }
}

/// Parse "p/q", an integer, or a plain decimal (optionally with exponent)
/// into an exact rational. Decimals are taken at face value, not as the
/// nearest binary float.
pub fn parse_exact(text: &str) -> Result<Exact, ParseError> {
    let s = text.trim();
    let bad = || ParseError::BadNumber(text.to_string());
    if s.is_empty() {
        return Err(bad());
    }
    if s.contains('/') {
        let (p, q) = s.split_once('/').ok_or_else(bad)?;
        let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
        let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(p, q));
    }
    if let Ok(i) = BigInt::from_str(s) {
        return Ok(BigRational::from_integer(i));
    }
    parse_decimal(s).ok_or_else(bad)
}

fn parse_decimal(s: &str) -> Option<Exact> {
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i64>().ok()?),
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
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut value = BigRational::from_integer(BigInt::from_str(&all_digits).ok()?);
    let scale = exponent - frac_part.len() as i64;
    let ten = BigRational::from_integer(BigInt::from(10));
    let power = num_traits::pow(ten, scale.unsigned_abs() as usize);
    if scale >= 0 {
        value *= power;
    } else {
        value /= power;
    }
    Some(if negative { -value } else { value })
}

/// Convenience constructor for tests and fixtures.
pub fn ratio(p: i64, q: i64) -> Exact {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// Convenience constructor for integers.
pub fn int(p: i64) -> Exact {
    BigRational::from_integer(BigInt::from(p))
}
