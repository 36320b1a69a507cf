use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// An exact value in ½ℤ, stored as its numerator over 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct HalfInteger {
    numerator: i64,
}

impl HalfInteger {
    pub const ZERO: HalfInteger = HalfInteger { numerator: 0 };

    pub const fn from_halves(numerator: i64) -> Self {
        HalfInteger { numerator }
    }

    pub const fn from_int(k: i64) -> Self {
        HalfInteger { numerator: 2 * k }
    }

    pub const fn numerator(self) -> i64 {
        self.numerator
    }

    pub const fn is_integral(self) -> bool {
        self.numerator % 2 == 0
    }

    pub fn as_int(self) -> Option<i64> {
        self.is_integral().then_some(self.numerator / 2)
    }

    pub fn as_f64(self) -> f64 {
        self.numerator as f64 / 2.0
    }
}

impl From<i64> for HalfInteger {
    fn from(k: i64) -> Self {
        HalfInteger::from_int(k)
    }
}

impl Add for HalfInteger {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        HalfInteger::from_halves(self.numerator + rhs.numerator)
    }
}

impl AddAssign for HalfInteger {
    fn add_assign(&mut self, rhs: Self) {
        self.numerator += rhs.numerator;
    }
}

impl Sub for HalfInteger {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        HalfInteger::from_halves(self.numerator - rhs.numerator)
    }
}

impl Neg for HalfInteger {
    type Output = Self;
    fn neg(self) -> Self {
        HalfInteger::from_halves(-self.numerator)
    }
}

impl Mul<i64> for HalfInteger {
    type Output = Self;
    fn mul(self, rhs: i64) -> Self {
        HalfInteger::from_halves(self.numerator * rhs)
    }
}

impl std::iter::Sum for HalfInteger {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(HalfInteger::ZERO, |a, b| a + b)
    }
}

/// Integers print plainly, odd halves as `k/2`.
impl fmt::Display for HalfInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_int() {
            Some(k) => write!(f, "{k}"),
            None => write!(f, "{}/2", self.numerator),
        }
    }
}

impl FromStr for HalfInteger {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if let Some(num) = s.strip_suffix("/2") {
            let k: i64 = num.trim().parse().map_err(|_| format!("bad half-integer `{s}`"))?;
            Ok(HalfInteger::from_halves(k))
        } else {
            let k: i64 = s.parse().map_err(|_| format!("bad half-integer `{s}`"))?;
            Ok(HalfInteger::from_int(k))
        }
    }
}

impl Serialize for HalfInteger {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for HalfInteger {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn display_forms() {
        assert_eq!(HalfInteger::from_halves(1).to_string(), "1/2");
        assert_eq!(HalfInteger::from_halves(-3).to_string(), "-3/2");
        assert_eq!(HalfInteger::from_halves(-2).to_string(), "-1");
        assert_eq!(HalfInteger::ZERO.to_string(), "0");
    }

    #[test]
    fn half_plus_minus_half_is_zero() {
        let h = HalfInteger::from_halves(1);
        assert_eq!(h + (-h), HalfInteger::ZERO);
        assert!((h + h).is_integral());
    }

    proptest! {
        #[test]
        fn string_roundtrip(k in -1_000_000i64..1_000_000) {
            let h = HalfInteger::from_halves(k);
            prop_assert_eq!(h.to_string().parse::<HalfInteger>().unwrap(), h);
        }
    }
}
