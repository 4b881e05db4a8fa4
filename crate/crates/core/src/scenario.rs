use std::fmt;
use std::str::FromStr;

use crate::error::Error;

/// The problem families exposed by the command-line tool.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scenario {
    GaussianIdentity,
    GaussianSum,
    BinaryXor,
    BinaryAnd,
    Multihop,
    Worstcase,
}

impl Scenario {
    pub const ALL: [Scenario; 6] = [
        Scenario::GaussianIdentity,
        Scenario::GaussianSum,
        Scenario::BinaryXor,
        Scenario::BinaryAnd,
        Scenario::Multihop,
        Scenario::Worstcase,
    ];

    pub fn tag(&self) -> &'static str {
        match self {
            Scenario::GaussianIdentity => "gaussian-identity",
            Scenario::GaussianSum => "gaussian-sum",
            Scenario::BinaryXor => "binary-xor",
            Scenario::BinaryAnd => "binary-and",
            Scenario::Multihop => "multihop",
            Scenario::Worstcase => "worstcase",
        }
    }

    /// Whether the model parameter is a crossover probability rather than a
    /// correlation.
    pub fn is_binary(&self) -> bool {
        matches!(self, Scenario::BinaryXor | Scenario::BinaryAnd)
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.tag() == s)
            .ok_or_else(|| Error::Domain(format!("unknown scenario '{s}'")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tags_round_trip() {
        for sc in Scenario::ALL {
            assert_eq!(sc.tag().parse::<Scenario>().unwrap(), sc);
        }
        assert!("gaussian".parse::<Scenario>().is_err());
    }
}
