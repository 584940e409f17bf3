use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// State of a pedestrian traffic light.
///
/// Classifiers address classes by index; `Red` is class 0 so that the
/// lowest-index tie-break resolves to the fail-safe answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Light {
    Red,
    Green,
}

impl Light {
    pub const ALL: [Light; 2] = [Light::Red, Light::Green];

    pub fn class_id(self) -> usize {
        match self {
            Light::Red => 0,
            Light::Green => 1,
        }
    }

    pub fn from_class_id(id: usize) -> Option<Light> {
        match id {
            0 => Some(Light::Red),
            1 => Some(Light::Green),
            _ => None,
        }
    }

    pub fn class_names() -> Vec<String> {
        Self::ALL.iter().map(|l| l.to_string()).collect()
    }

    pub fn other(self) -> Light {
        match self {
            Light::Red => Light::Green,
            Light::Green => Light::Red,
        }
    }
}

impl fmt::Display for Light {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            Light::Red => "red",
            Light::Green => "green",
        })
    }
}

impl FromStr for Light {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "red" => Ok(Light::Red),
            "green" => Ok(Light::Green),
            other => Err(format!("unknown light label `{other}`")),
        }
    }
}

/// Output of a full classification method: a light state or `Unavailable`
/// when the method has no usable evidence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    Red,
    Green,
    Unavailable,
}

impl Decision {
    pub fn light(self) -> Option<Light> {
        match self {
            Decision::Red => Some(Light::Red),
            Decision::Green => Some(Light::Green),
            Decision::Unavailable => None,
        }
    }

    /// Unavailable never counts as correct.
    pub fn is_correct(self, truth: Light) -> bool {
        self.light() == Some(truth)
    }
}

impl From<Light> for Decision {
    fn from(l: Light) -> Self {
        match l {
            Light::Red => Decision::Red,
            Light::Green => Decision::Green,
        }
    }
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Decision::Red => f.pad("red"),
            Decision::Green => f.pad("green"),
            Decision::Unavailable => f.pad("unavailable"),
        }
    }
}
