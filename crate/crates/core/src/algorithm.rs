use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// The four allocation rules the harness compares.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    MaxSum,
    Leximin,
    Propm,
    Mms34,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::MaxSum,
        Algorithm::Leximin,
        Algorithm::Propm,
        Algorithm::Mms34,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::MaxSum => "maxsum",
            Algorithm::Leximin => "leximin",
            Algorithm::Propm => "propm",
            Algorithm::Mms34 => "mms34",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown algorithm {0:?} (expected one of maxsum, leximin, propm, mms34)")]
pub struct UnknownAlgorithm(pub String);

impl FromStr for Algorithm {
    type Err = UnknownAlgorithm;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| UnknownAlgorithm(s.to_string()))
    }
}
