//! Exact rational arithmetic for probability weights and thresholds.
//!
//! Atom weights and loss thresholds are kept as exact rationals so that
//! strict comparisons such as `P > rho` never depend on float rounding.
//! Rationals serialize as `{num, den}` integer pairs.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest denominator accepted when parsing a plain decimal flag value.
pub const MAX_DECIMAL_DENOMINATOR: i64 = 1 << 16;

/// An exact rational number, always stored in reduced form with a positive
/// denominator.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(Ratio<i64>);

impl Rational {
    pub fn new(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::Invalid("rational with zero denominator".into()));
        }
        Ok(Rational(Ratio::new(num, den)))
    }

    pub const fn zero() -> Self {
        Rational(Ratio::new_raw(0, 1))
    }

    pub const fn one() -> Self {
        Rational(Ratio::new_raw(1, 1))
    }

    pub fn from_int(v: i64) -> Self {
        Rational(Ratio::from_integer(v))
    }

    pub fn numer(&self) -> i64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i64 {
        *self.0.denom()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn clamp_unit(self) -> Self {
        self.max(Rational::zero()).min(Rational::one())
    }

    /// Parses either `p/q` or a plain decimal. Decimals must be exactly
    /// representable with denominator at most 2^16; anything else is rejected
    /// rather than silently rounded.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            let num: i64 = p
                .trim()
                .parse()
                .map_err(|_| Error::Invalid(format!("bad rational numerator in `{s}`")))?;
            let den: i64 = q
                .trim()
                .parse()
                .map_err(|_| Error::Invalid(format!("bad rational denominator in `{s}`")))?;
            return Rational::new(num, den);
        }
        let (sign, body) = match s.strip_prefix('-') {
            Some(rest) => (-1i64, rest),
            None => (1i64, s.strip_prefix('+').unwrap_or(s)),
        };
        let (int_part, frac_part) = match body.split_once('.') {
            Some((i, f)) => (i, f),
            None => (body, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(Error::Invalid(format!("empty rational literal `{s}`")));
        }
        let int: i64 = if int_part.is_empty() {
            0
        } else {
            int_part
                .parse()
                .map_err(|_| Error::Invalid(format!("bad rational literal `{s}`")))?
        };
        let mut num = int;
        let mut den: i64 = 1;
        for c in frac_part.chars() {
            let d = c
                .to_digit(10)
                .ok_or_else(|| Error::Invalid(format!("bad rational literal `{s}`")))?;
            num = num
                .checked_mul(10)
                .and_then(|n| n.checked_add(d as i64))
                .ok_or_else(|| Error::Invalid(format!("rational literal `{s}` overflows")))?;
            den = den
                .checked_mul(10)
                .ok_or_else(|| Error::Invalid(format!("rational literal `{s}` overflows")))?;
        }
        let r = Ratio::new(sign * num, den);
        if *r.denom() > MAX_DECIMAL_DENOMINATOR {
            return Err(Error::Invalid(format!(
                "decimal `{s}` is not exactly representable with denominator <= {MAX_DECIMAL_DENOMINATOR}; \
                 use p/q syntax"
            )));
        }
        Ok(Rational(r))
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom() == 1 {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Rational::parse(s)
    }
}

impl Add for Rational {
    type Output = Rational;
    fn add(self, rhs: Self) -> Self {
        Rational(self.0 + rhs.0)
    }
}

impl Sub for Rational {
    type Output = Rational;
    fn sub(self, rhs: Self) -> Self {
        Rational(self.0 - rhs.0)
    }
}

impl Mul for Rational {
    type Output = Rational;
    fn mul(self, rhs: Self) -> Self {
        Rational(self.0 * rhs.0)
    }
}

impl Div for Rational {
    type Output = Rational;
    fn div(self, rhs: Self) -> Self {
        Rational(self.0 / rhs.0)
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Self {
        Rational(-self.0)
    }
}

impl std::iter::Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |a, b| a + b)
    }
}

#[derive(Serialize, Deserialize)]
struct RationalRepr {
    num: i64,
    den: i64,
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        RationalRepr {
            num: self.numer(),
            den: self.denom(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = RationalRepr::deserialize(deserializer)?;
        Rational::new(repr.num, repr.den).map_err(serde::de::Error::custom)
    }
}
