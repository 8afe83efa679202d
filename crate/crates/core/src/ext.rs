//! Extended reals: a finite value or `+∞`.
//!
//! Distances in an extended metric space may be infinite, and so may the
//! costs and entropies derived from them. Keeping the infinite case as an
//! explicit variant makes finite-distance classes visible at every call site
//! instead of hiding them behind `f64::INFINITY`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A real number or `+∞`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Ext {
    Finite(f64),
    Infinite,
}

pub use Ext::{Finite, Infinite};

impl Ext {
    pub const ZERO: Ext = Ext::Finite(0.0);

    /// Builds from an `f64`, mapping `f64::INFINITY` to [`Ext::Infinite`].
    ///
    /// NaN and `-∞` have no extended-real meaning and are rejected.
    pub fn from_f64(x: f64) -> Result<Ext> {
        if x.is_nan() {
            Err(Error::Arithmetic("NaN is not an extended real"))
        } else if x == f64::INFINITY {
            Ok(Ext::Infinite)
        } else if x == f64::NEG_INFINITY {
            Err(Error::Arithmetic("-inf is not an extended real"))
        } else {
            Ok(Ext::Finite(x))
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Ext::Finite(_))
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Ext::Infinite)
    }

    /// The finite value, if any.
    pub fn finite(self) -> Option<f64> {
        match self {
            Ext::Finite(x) => Some(x),
            Ext::Infinite => None,
        }
    }

    /// Lossy view as `f64` with `+∞` mapped to `f64::INFINITY`.
    pub fn to_f64(self) -> f64 {
        match self {
            Ext::Finite(x) => x,
            Ext::Infinite => f64::INFINITY,
        }
    }

    pub fn square(self) -> Ext {
        match self {
            Ext::Finite(x) => Ext::Finite(x * x),
            Ext::Infinite => Ext::Infinite,
        }
    }

    /// Square root of a nonnegative extended real.
    pub fn sqrt(self) -> Ext {
        match self {
            Ext::Finite(x) => Ext::Finite(x.max(0.0).sqrt()),
            Ext::Infinite => Ext::Infinite,
        }
    }

    /// `self · w` for a finite nonnegative weight. `∞ · 0` is an error.
    pub fn scale(self, w: f64) -> Result<Ext> {
        match self {
            Ext::Finite(x) => Ok(Ext::Finite(x * w)),
            Ext::Infinite if w > 0.0 => Ok(Ext::Infinite),
            Ext::Infinite if w == 0.0 => Err(Error::Arithmetic("inf * 0 is undefined")),
            Ext::Infinite => Err(Error::Arithmetic("inf scaled by a negative weight")),
        }
    }

    pub fn min(self, other: Ext) -> Ext {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Ext) -> Ext {
        if self >= other {
            self
        } else {
            other
        }
    }
}

impl Add for Ext {
    type Output = Ext;

    fn add(self, rhs: Ext) -> Ext {
        match (self, rhs) {
            (Ext::Finite(a), Ext::Finite(b)) => Ext::Finite(a + b),
            _ => Ext::Infinite,
        }
    }
}

impl std::iter::Sum for Ext {
    fn sum<I: Iterator<Item = Ext>>(iter: I) -> Ext {
        iter.fold(Ext::ZERO, |a, b| a + b)
    }
}

impl PartialOrd for Ext {
    fn partial_cmp(&self, other: &Ext) -> Option<Ordering> {
        match (self, other) {
            (Ext::Finite(a), Ext::Finite(b)) => a.partial_cmp(b),
            (Ext::Finite(_), Ext::Infinite) => Some(Ordering::Less),
            (Ext::Infinite, Ext::Finite(_)) => Some(Ordering::Greater),
            (Ext::Infinite, Ext::Infinite) => Some(Ordering::Equal),
        }
    }
}

impl From<f64> for Ext {
    /// Panics on NaN; use [`Ext::from_f64`] for untrusted input.
    fn from(x: f64) -> Ext {
        Ext::from_f64(x).expect("finite or +inf value")
    }
}

impl fmt::Display for Ext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ext::Finite(x) => write!(f, "{x}"),
            Ext::Infinite => f.write_str("inf"),
        }
    }
}

// Serialized as a JSON number or the literal string "inf".
impl Serialize for Ext {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Ext::Finite(x) => s.serialize_f64(*x),
            Ext::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Ext {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Ext, D::Error> {
        struct ExtVisitor;

        impl Visitor<'_> for ExtVisitor {
            type Value = Ext;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a number or the string \"inf\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Ext, E> {
                Ext::from_f64(v).map_err(E::custom)
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Ext, E> {
                Ok(Ext::Finite(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Ext, E> {
                Ok(Ext::Finite(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Ext, E> {
                match v {
                    "inf" | "+inf" | "Infinity" => Ok(Ext::Infinite),
                    _ => Err(E::invalid_value(de::Unexpected::Str(v), &self)),
                }
            }
        }

        d.deserialize_any(ExtVisitor)
    }
}
