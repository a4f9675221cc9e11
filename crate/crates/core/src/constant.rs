//! Exact real constants.
//!
//! Thresholds in requirements are written as decimals (`20`, `0.1`, `-3.25`)
//! and compared exactly, so they are held as arbitrary-precision rationals
//! rather than binary floats. Every value that can be produced by parsing or
//! by region representatives (midpoints, `c - 1`, `c + 1`) has a finite
//! decimal expansion and prints back in the same syntax it was parsed from.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid decimal constant `{0}`")]
pub struct ConstantError(pub String);

/// An exact rational number with a decimal surface syntax.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Constant(BigRational);

impl Constant {
    pub fn from_integer(value: i64) -> Self {
        Constant(BigRational::from_integer(BigInt::from(value)))
    }

    pub fn from_ratio(numer: i64, denom: i64) -> Self {
        Constant(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }

    pub fn plus_one(&self) -> Self {
        Constant(&self.0 + BigRational::one())
    }

    pub fn minus_one(&self) -> Self {
        Constant(&self.0 - BigRational::one())
    }

    pub fn midpoint(&self, other: &Constant) -> Self {
        Constant((&self.0 + &other.0) / BigRational::from_integer(BigInt::from(2)))
    }

    /// Lossy conversion for display in contexts that need a float (Python).
    pub fn to_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Exact decimal digits, or `None` when the denominator has a prime factor
    /// other than 2 or 5.
    fn decimal_string(&self) -> Option<String> {
        let ten = BigInt::from(10);
        let mut denom = self.0.denom().clone();
        let mut scale = 0usize;
        for p in [2, 5] {
            let p = BigInt::from(p);
            while (&denom % &p).is_zero() {
                denom /= &p;
            }
        }
        if !denom.is_one() {
            return None;
        }
        let mut scaled = self.0.clone();
        while !scaled.is_integer() {
            scaled *= BigRational::from_integer(ten.clone());
            scale += 1;
        }
        let digits = scaled.to_integer().abs().to_string();
        let sign = if self.0.is_negative() { "-" } else { "" };
        if scale == 0 {
            return Some(format!("{sign}{digits}"));
        }
        let padded = format!("{digits:0>width$}", width = scale + 1);
        let (int_part, frac_part) = padded.split_at(padded.len() - scale);
        Some(format!("{sign}{int_part}.{frac_part}"))
    }
}

impl FromStr for Constant {
    type Err = ConstantError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let err = || ConstantError(text.to_string());
        let (negative, body) = match text.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, text),
        };
        let (int_part, frac_part) = match body.split_once('.') {
            Some((i, f)) => (i, f),
            None => (body, ""),
        };
        let all_digits = |s: &str| s.bytes().all(|b| b.is_ascii_digit());
        if int_part.is_empty()
            || !all_digits(int_part)
            || !all_digits(frac_part)
            || (body.contains('.') && frac_part.is_empty())
        {
            return Err(err());
        }
        let numer: BigInt = format!("{int_part}{frac_part}").parse().map_err(|_| err())?;
        let denom = num_traits::pow(BigInt::from(10), frac_part.len());
        let value = BigRational::new(if negative { -numer } else { numer }, denom);
        Ok(Constant(value))
    }
}

impl fmt::Display for Constant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.decimal_string() {
            Some(s) => f.write_str(&s),
            None => write!(f, "{}/{}", self.0.numer(), self.0.denom()),
        }
    }
}

impl Serialize for Constant {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Constant {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}
