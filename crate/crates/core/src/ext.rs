//! Nonnegative extended reals `[0, +inf]`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A value in `[0, +inf]`. `+inf` is a first-class value, not an overflow marker.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Default)]
pub struct ExtReal(f64);

impl ExtReal {
    pub const ZERO: ExtReal = ExtReal(0.0);
    pub const ONE: ExtReal = ExtReal(1.0);
    pub const INFINITY: ExtReal = ExtReal(f64::INFINITY);

    /// Wraps a nonnegative value. Rounding noise below zero is clamped to 0;
    /// NaN is mapped to `+inf` (it only arises from `inf - inf` style forms).
    #[inline]
    pub fn new(v: f64) -> Self {
        if v.is_nan() {
            ExtReal::INFINITY
        } else {
            ExtReal(v.max(0.0))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }

    #[inline]
    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    /// Multiplication by a nonnegative scalar with the convention `0 * inf = 0`.
    #[inline]
    pub fn scale(self, c: f64) -> Self {
        if c == 0.0 {
            ExtReal::ZERO
        } else {
            ExtReal::new(self.0 * c)
        }
    }

    /// Natural logarithm; `ln 0 = -inf`, `ln inf = inf`.
    #[inline]
    pub fn ln(self) -> f64 {
        self.0.ln()
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn total_cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl From<f64> for ExtReal {
    fn from(v: f64) -> Self {
        ExtReal::new(v)
    }
}

impl Add for ExtReal {
    type Output = ExtReal;
    fn add(self, rhs: Self) -> Self {
        ExtReal(self.0 + rhs.0)
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_infinite() {
            write!(f, "inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        crate::report::ser_f64(&self.0, s)
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Str(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(v) if v >= 0.0 => Ok(ExtReal(v)),
            Repr::Num(v) => Err(serde::de::Error::custom(format!("negative value {v}"))),
            Repr::Str(s) if s == "inf" => Ok(ExtReal::INFINITY),
            Repr::Str(s) => Err(serde::de::Error::custom(format!("expected number or \"inf\", got {s:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_times_infinity_is_zero() {
        assert_eq!(ExtReal::INFINITY.scale(0.0), ExtReal::ZERO);
        assert!(ExtReal::INFINITY.scale(2.0).is_infinite());
    }

    #[test]
    fn ordering_and_clamping() {
        assert!(ExtReal::new(1.0) < ExtReal::INFINITY);
        assert_eq!(ExtReal::new(-1e-18), ExtReal::ZERO);
        assert!(ExtReal::new(f64::NAN).is_infinite());
        assert_eq!((ExtReal::new(2.0) + ExtReal::INFINITY), ExtReal::INFINITY);
    }

    #[test]
    fn json_round_trip_of_infinity() {
        let s = serde_json::to_string(&ExtReal::INFINITY).unwrap();
        assert_eq!(s, "\"inf\"");
        let back: ExtReal = serde_json::from_str(&s).unwrap();
        assert!(back.is_infinite());
    }
}
