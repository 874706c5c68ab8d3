//! Exact rational numbers with checked arithmetic.
//!
//! Every exponent and every gamma/beta argument in the crate is a [`Rational`].
//! Values are always stored in lowest terms with a positive denominator, and
//! any operation that would leave the `i64` range reports
//! [`RationalError::Overflow`] instead of wrapping.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, ToPrimitive};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RationalError {
    #[error("rational arithmetic overflow")]
    Overflow,
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("invalid rational literal `{0}`")]
    Invalid(String),
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rational(Ratio<i64>);

impl Rational {
    pub const ZERO: Rational = Rational(Ratio::new_raw(0, 1));
    pub const ONE: Rational = Rational(Ratio::new_raw(1, 1));
    pub const HALF: Rational = Rational(Ratio::new_raw(1, 2));

    pub fn new(num: i64, den: i64) -> Result<Self, RationalError> {
        if den == 0 {
            return Err(RationalError::ZeroDenominator);
        }
        if num == i64::MIN || den == i64::MIN {
            return Err(RationalError::Overflow);
        }
        Self::checked(Ratio::new(num, den))
    }

    pub fn integer(n: i64) -> Self {
        assert!(n != i64::MIN, "i64::MIN is not a representable rational");
        Rational(Ratio::from_integer(n))
    }

    /// `num/den` for literals known to be valid; panics otherwise.
    pub fn frac(num: i64, den: i64) -> Self {
        Self::new(num, den).expect("valid rational literal")
    }

    fn checked(r: Ratio<i64>) -> Result<Self, RationalError> {
        if *r.numer() == i64::MIN || *r.denom() == i64::MIN {
            Err(RationalError::Overflow)
        } else {
            Ok(Rational(r))
        }
    }

    pub fn numer(&self) -> i64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i64 {
        *self.0.denom()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_zero(&self) -> bool {
        self.numer() == 0
    }

    pub fn is_positive(&self) -> bool {
        self.numer() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.numer() < 0
    }

    /// The integer value, if this is an integer.
    pub fn to_integer(&self) -> Option<i64> {
        self.is_integer().then(|| self.numer())
    }

    /// True for `n + 1/2` with integer `n`.
    pub fn is_half_integer(&self) -> bool {
        self.denom() == 2
    }

    /// Largest integer not above the value.
    pub fn floor(&self) -> i64 {
        Integer::div_floor(&self.numer(), &self.denom())
    }

    /// Fractional part in `[0, 1)`.
    pub fn fract(&self) -> Rational {
        // cannot overflow: |result| < 1
        Rational(Ratio::new(Integer::mod_floor(&self.numer(), &self.denom()), self.denom()))
    }

    pub fn checked_add(&self, rhs: &Rational) -> Result<Rational, RationalError> {
        self.0.checked_add(&rhs.0).ok_or(RationalError::Overflow).and_then(Self::checked)
    }

    pub fn checked_sub(&self, rhs: &Rational) -> Result<Rational, RationalError> {
        self.0.checked_sub(&rhs.0).ok_or(RationalError::Overflow).and_then(Self::checked)
    }

    pub fn checked_mul(&self, rhs: &Rational) -> Result<Rational, RationalError> {
        self.0.checked_mul(&rhs.0).ok_or(RationalError::Overflow).and_then(Self::checked)
    }

    pub fn checked_div(&self, rhs: &Rational) -> Result<Rational, RationalError> {
        if rhs.is_zero() {
            return Err(RationalError::ZeroDenominator);
        }
        self.0.checked_div(&rhs.0).ok_or(RationalError::Overflow).and_then(Self::checked)
    }

    pub fn checked_neg(&self) -> Rational {
        // i64::MIN is excluded on construction, so negation is total
        Rational(-self.0)
    }

    pub fn recip(&self) -> Result<Rational, RationalError> {
        Rational::ONE.checked_div(self)
    }

    /// Integer power with overflow detection.
    pub fn checked_pow(&self, exp: i64) -> Result<Rational, RationalError> {
        let base = if exp < 0 { self.recip()? } else { *self };
        let mut acc = Rational::ONE;
        for _ in 0..exp.unsigned_abs() {
            acc = acc.checked_mul(&base)?;
        }
        Ok(acc)
    }

    pub fn to_f64(&self) -> f64 {
        self.to_real()
    }

    pub fn to_real<F: Real>(&self) -> F {
        // numerator and denominator are both exactly representable up to 2^53;
        // beyond that the quotient is still correctly rounded to within 2 ulp
        let n = F::from_i64(self.numer()).expect("i64 to float");
        let d = F::from_i64(self.denom()).expect("i64 to float");
        n / d
    }
}

impl Default for Rational {
    fn default() -> Self {
        Rational::ZERO
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::integer(n)
    }
}

impl From<i32> for Rational {
    fn from(n: i32) -> Self {
        Rational::integer(n.into())
    }
}

impl ToPrimitive for Rational {
    fn to_i64(&self) -> Option<i64> {
        self.to_integer()
    }

    fn to_u64(&self) -> Option<u64> {
        self.to_integer().and_then(|n| u64::try_from(n).ok())
    }

    fn to_f64(&self) -> Option<f64> {
        Some(Rational::to_f64(self))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = RationalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let invalid = || RationalError::Invalid(s.to_string());
        let t = s.trim();
        let (n, d) = match t.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (t, "1"),
        };
        let num: i64 = n.parse().map_err(|_| invalid())?;
        let den: i64 = d.parse().map_err(|_| invalid())?;
        match den {
            0 => return Err(RationalError::ZeroDenominator),
            d if d < 0 => return Err(invalid()),
            _ => {}
        }
        Rational::new(num, den)
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Int(i64),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Int(n) => Rational::new(n, 1).map_err(serde::de::Error::custom),
            Repr::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Compares against an integer without allocating a rational.
impl PartialEq<i64> for Rational {
    fn eq(&self, other: &i64) -> bool {
        self.is_integer() && self.numer() == *other
    }
}

impl PartialOrd<i64> for Rational {
    fn partial_cmp(&self, other: &i64) -> Option<Ordering> {
        Some(self.0.cmp(&Ratio::from_integer(*other)))
    }
}
