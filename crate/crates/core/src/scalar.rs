//! Real parameters that optionally carry an exact rational value.

use std::fmt;
use std::str::FromStr;

use num::bigint::BigInt;
use num::{FromPrimitive, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::Rational;

/// A real number used as a family or extension parameter.
///
/// Values parsed from text (`"-3/10"`, `"-0.3"`, `"1e-2"`) keep their exact
/// rational value, so every coefficient derived from them is available in
/// exact arithmetic. Values built from an `f64` are approximate only.
#[derive(Clone, Debug, PartialEq)]
pub struct Real {
    value: f64,
    exact: Option<Rational>,
}

impl Real {
    pub fn exact(q: Rational) -> Self {
        let value = q.to_f64().unwrap_or(f64::NAN);
        Real {
            value,
            exact: Some(q),
        }
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Real::exact(Rational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn integer(n: i64) -> Self {
        Real::ratio(n, 1)
    }

    /// An approximate value without an exact counterpart.
    pub fn approx(value: f64) -> Self {
        Real { value, exact: None }
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn as_exact(&self) -> Option<&Rational> {
        self.exact.as_ref()
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
    }

    /// Parses `p/q`, an integer, or a decimal literal with optional exponent.
    pub fn parse(text: &str) -> Result<Self> {
        let s = text.trim();
        let bad = || Error::InvalidParameter(format!("cannot parse number {text:?}"));
        if s.is_empty() {
            return Err(bad());
        }
        if let Some((p, q)) = s.split_once('/') {
            let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
            let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            return Ok(Real::exact(Rational::new(p, q)));
        }
        let (mantissa, exponent) = match s.find(['e', 'E']) {
            Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
            None => (s, 0),
        };
        let (negative, digits) = match mantissa.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
        };
        let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(bad());
        }
        if !int_part
            .chars()
            .chain(frac_part.chars())
            .all(|c| c.is_ascii_digit())
        {
            return Err(bad());
        }
        let all: String = format!("{int_part}{frac_part}");
        let mut num = BigInt::from_str(&all).map_err(|_| bad())?;
        if negative {
            num = -num;
        }
        let scale = exponent - frac_part.len() as i32;
        let ten = BigInt::from(10u8);
        let q = if scale >= 0 {
            Rational::from_integer(num * num::pow(ten, scale as usize))
        } else {
            Rational::new(num, num::pow(ten, (-scale) as usize))
        };
        Ok(Real::exact(q))
    }

    /// Shortest decimal rendering of an `f64`, read back as an exact rational.
    pub fn from_f64_decimal(value: f64) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::InvalidParameter(format!("non-finite value {value}")));
        }
        Real::parse(&format!("{value:e}"))
    }

    /// Text form: `p/q` (or `p`) when exact, otherwise the decimal value.
    pub fn to_text(&self) -> String {
        match &self.exact {
            Some(q) => q.to_string(),
            None => format!("{:e}", self.value),
        }
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl From<f64> for Real {
    fn from(v: f64) -> Self {
        Real::approx(v)
    }
}

/// Arithmetic shared by the `f64` and exact rational code paths, so that each
/// coefficient formula is written once.
pub trait Field:
    Clone
    + PartialOrd
    + Zero
    + One
    + std::ops::Add<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::Mul<Output = Self>
    + std::ops::Div<Output = Self>
    + std::ops::Neg<Output = Self>
{
    fn from_int(n: i64) -> Self;
    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_int(num) / Self::from_int(den)
    }
}

impl Field for f64 {
    fn from_int(n: i64) -> Self {
        n as f64
    }
}

impl Field for Rational {
    fn from_int(n: i64) -> Self {
        Rational::from_i64(n).expect("i64 is representable")
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }
}

pub(crate) fn is_positive(q: &Rational) -> bool {
    q.is_positive()
}
