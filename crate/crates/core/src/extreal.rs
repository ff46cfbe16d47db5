//! Nonnegative extended reals `[0, ∞]`.
//!
//! Values of Φ-functions, their conjugates and recession functions live here.
//! Addition saturates at `+∞`, and `0 · ∞ = 0` so that an infinite weight
//! integrated against a zero mass contributes nothing.

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExtReal(f64);

impl ExtReal {
    pub const ZERO: ExtReal = ExtReal(0.0);
    pub const ONE: ExtReal = ExtReal(1.0);
    pub const INFINITY: ExtReal = ExtReal(f64::INFINITY);

    /// Wraps a value; negative inputs clamp to zero, NaN maps to `+∞`
    /// (NaN only arises from `∞ − ∞`-type overflow in callers).
    pub fn new(v: f64) -> Self {
        if v.is_nan() {
            ExtReal(f64::INFINITY)
        } else {
            ExtReal(v.max(0.0))
        }
    }

    pub fn finite(v: f64) -> Self {
        debug_assert!(v.is_finite());
        ExtReal::new(v)
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    /// Raw `f64`, with `+∞` as `f64::INFINITY`.
    pub fn value(self) -> f64 {
        self.0
    }

    /// Finite value or `None`.
    pub fn to_finite(self) -> Option<f64> {
        self.is_finite().then_some(self.0)
    }

    pub fn max(self, other: ExtReal) -> ExtReal {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn min(self, other: ExtReal) -> ExtReal {
        if self <= other {
            self
        } else {
            other
        }
    }

    /// Multiplication by a nonnegative real with `0 · ∞ = 0`.
    pub fn scale(self, k: f64) -> ExtReal {
        debug_assert!(k >= 0.0);
        if k == 0.0 {
            ExtReal::ZERO
        } else {
            ExtReal::new(self.0 * k)
        }
    }
}

impl Default for ExtReal {
    fn default() -> Self {
        ExtReal::ZERO
    }
}

impl From<f64> for ExtReal {
    fn from(v: f64) -> Self {
        ExtReal::new(v)
    }
}

impl Add for ExtReal {
    type Output = ExtReal;
    fn add(self, rhs: ExtReal) -> ExtReal {
        ExtReal::new(self.0 + rhs.0)
    }
}

impl AddAssign for ExtReal {
    fn add_assign(&mut self, rhs: ExtReal) {
        *self = *self + rhs;
    }
}

impl Mul for ExtReal {
    type Output = ExtReal;
    fn mul(self, rhs: ExtReal) -> ExtReal {
        if self.0 == 0.0 || rhs.0 == 0.0 {
            ExtReal::ZERO
        } else {
            ExtReal::new(self.0 * rhs.0)
        }
    }
}

impl std::iter::Sum for ExtReal {
    fn sum<I: Iterator<Item = ExtReal>>(iter: I) -> ExtReal {
        iter.fold(ExtReal::ZERO, |a, b| a + b)
    }
}

impl Eq for ExtReal {}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtReal {
    fn cmp(&self, other: &Self) -> Ordering {
        // NaN is excluded at construction.
        self.0.total_cmp(&other.0)
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            write!(f, "inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

/// Finite values serialize as JSON numbers, `+∞` as the string `"inf"`.
impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
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
            Repr::Num(v) if v >= 0.0 => Ok(ExtReal::new(v)),
            Repr::Num(v) => Err(serde::de::Error::custom(format!("negative value {v}"))),
            Repr::Str(s) if s == "inf" => Ok(ExtReal::INFINITY),
            Repr::Str(s) => Err(serde::de::Error::custom(format!("expected number or \"inf\", got {s:?}"))),
        }
    }
}

/// Serde adapter for signed `f64` fields that may be `±∞` (`"inf"`, `"-inf"`).
pub mod signed {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if *v == f64::INFINITY {
            s.serialize_str("inf")
        } else if *v == f64::NEG_INFINITY {
            s.serialize_str("-inf")
        } else {
            s.serialize_f64(*v)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Str(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Str(s) if s == "inf" => Ok(f64::INFINITY),
            Repr::Str(s) if s == "-inf" => Ok(f64::NEG_INFINITY),
            Repr::Str(s) => Err(serde::de::Error::custom(format!("expected number, got {s:?}"))),
        }
    }
}
