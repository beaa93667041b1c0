//! Extended-real values for rate functions.

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;

/// A rate-function value that may be `+inf`.
///
/// Serialized as a JSON number, or as the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RateValue {
    Finite(f64),
    Infinite,
}

impl RateValue {
    pub fn from_f64(x: f64) -> Self {
        if x == f64::INFINITY {
            RateValue::Infinite
        } else {
            RateValue::Finite(x)
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, RateValue::Finite(_))
    }

    /// Finite value, or `f64::INFINITY` for in-memory arithmetic.
    pub fn to_f64(self) -> f64 {
        match self {
            RateValue::Finite(x) => x,
            RateValue::Infinite => f64::INFINITY,
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            RateValue::Finite(x) => Some(x),
            RateValue::Infinite => None,
        }
    }
}

impl fmt::Display for RateValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RateValue::Finite(x) => write!(f, "{x}"),
            RateValue::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for RateValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            RateValue::Finite(x) => s.serialize_f64(*x),
            RateValue::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for RateValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(x) => Ok(RateValue::Finite(x)),
            Raw::Str(s) if s == "inf" => Ok(RateValue::Infinite),
            Raw::Str(s) => Err(serde::de::Error::custom(format!(
                "expected \"inf\", got {s:?}"
            ))),
        }
    }
}
