use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// The three additive functionals of the reset process.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Functional {
    /// Time spent on [0, ∞).
    Occupation,
    /// Signed area ∫ x dt.
    Area,
    /// Absolute area ∫ |x| dt.
    AbsArea,
}

impl Functional {
    pub const ALL: [Functional; 3] = [
        Functional::Occupation,
        Functional::Area,
        Functional::AbsArea,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Functional::Occupation => "occupation",
            Functional::Area => "area",
            Functional::AbsArea => "absarea",
        }
    }
}

impl fmt::Display for Functional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Functional {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "occupation" | "a" => Ok(Functional::Occupation),
            "area" | "b" => Ok(Functional::Area),
            "absarea" | "c" => Ok(Functional::AbsArea),
            other => Err(crate::Error::InvalidConfig(format!(
                "unknown functional {other:?}"
            ))),
        }
    }
}
