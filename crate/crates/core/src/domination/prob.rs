use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use super::boxes::{ln_abs_bigint, to_f64, Rational};

/// Exact probability: a rational in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExactProb(Rational);

impl ExactProb {
    pub fn new(r: Rational) -> Self {
        debug_assert!(!r.is_negative() && r <= Rational::one(), "probability out of range: {r}");
        ExactProb(r)
    }

    pub fn zero() -> Self {
        ExactProb(Rational::zero())
    }

    pub fn one() -> Self {
        ExactProb(Rational::one())
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Self::new(Rational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn as_rational(&self) -> &Rational {
        &self.0
    }

    pub fn into_rational(self) -> Rational {
        self.0
    }

    /// `1 - p`.
    pub fn complement(&self) -> Self {
        ExactProb(Rational::one() - &self.0)
    }

    pub fn to_f64(&self) -> f64 {
        to_f64(&self.0)
    }

    /// Natural log, `-∞` for zero; accurate even when `to_f64` underflows.
    pub fn ln(&self) -> f64 {
        if self.0.is_zero() {
            return f64::NEG_INFINITY;
        }
        ln_abs_bigint(self.0.numer()) - ln_abs_bigint(self.0.denom())
    }

    /// Decimal rendering with `digits` digits after the point, rounded down.
    pub fn decimal(&self, digits: usize) -> String {
        let scale = BigInt::from(10).pow(digits as u32);
        let scaled = (self.0.numer() * &scale) / self.0.denom();
        let s = scaled.to_string();
        if digits == 0 {
            return s;
        }
        let padded = format!("{s:0>width$}", width = digits + 1);
        let (int, frac) = padded.split_at(padded.len() - digits);
        format!("{int}.{frac}")
    }
}

impl fmt::Display for ExactProb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Serialize for ExactProb {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}
