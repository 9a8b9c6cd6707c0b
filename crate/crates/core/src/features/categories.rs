//! Discrete character values.
//!
//! Every category has a stable lowercase string form used in JSON, CSV and
//! the classifier's domains.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownValue {
    pub kind: &'static str,
    pub value: String,
}

impl fmt::Display for UnknownValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown {} value {:?}", self.kind, self.value)
    }
}

impl std::error::Error for UnknownValue {}

/// Common surface of the category enums.
pub trait Category: Copy + Eq + Sized + 'static {
    const KIND: &'static str;
    const ALL: &'static [Self];
    fn as_str(self) -> &'static str;

    fn parse(s: &str) -> Result<Self, UnknownValue> {
        Self::ALL
            .iter()
            .copied()
            .find(|v| v.as_str() == s)
            .ok_or_else(|| UnknownValue { kind: Self::KIND, value: s.to_string() })
    }

    fn domain() -> Vec<&'static str> {
        Self::ALL.iter().map(|v| v.as_str()).collect()
    }
}

macro_rules! category {
    ($(#[$meta:meta])* $name:ident, $kind:literal { $($variant:ident => $text:literal),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum $name {
            $($variant),+
        }

        impl Category for $name {
            const KIND: &'static str = $kind;
            const ALL: &'static [Self] = &[$(Self::$variant),+];
            fn as_str(self) -> &'static str {
                match self {
                    $(Self::$variant => $text),+
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $name {
            type Err = UnknownValue;
            fn from_str(s: &str) -> Result<Self, Self::Err> {
                <Self as Category>::parse(s)
            }
        }

        impl Serialize for $name {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.serialize_str(self.as_str())
            }
        }

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                let s = String::deserialize(d)?;
                s.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

category!(Organization, "organization" {
    Simple => "simple",
    Compound => "compound",
});

category!(LaminarShape, "laminar_shape" {
    Elliptic => "elliptic",
    Obovate => "obovate",
    Ovate => "ovate",
    Oblong => "oblong",
    Linear => "linear",
    NotApplicable => "not_applicable",
});

category!(
    /// Length to width ratio bucket.
    LwClass, "lw_class" {
    Below1 => "lt_1",
    From1To2 => "1_2",
    From2To3 => "2_3",
    From3To10 => "3_10",
    From10 => "ge_10",
    NotApplicable => "not_applicable",
});

category!(MedialSymmetry, "medial_symmetry" {
    Symmetrical => "symmetrical",
    Asymmetrical => "asymmetrical",
    NotApplicable => "not_applicable",
});

category!(Lobation, "lobation" {
    Unlobed => "unlobed",
    Lobed => "lobed",
    NotApplicable => "not_applicable",
});

category!(LobeCount, "lobe_count" {
    Zero => "0",
    Two => "2",
    Three => "3",
    Four => "4",
    Five => "5",
    Six => "6",
    SevenPlus => "7+",
    NotApplicable => "not_applicable",
});

category!(Margin, "margin" {
    Toothed => "toothed",
    Untoothed => "untoothed",
    NotApplicable => "not_applicable",
});

category!(AngleClass, "angle" {
    Acute => "acute",
    Obtuse => "obtuse",
    Reflex => "reflex",
    NotApplicable => "not_applicable",
});

category!(ApexShape, "apex_shape" {
    Straight => "straight",
    Convex => "convex",
    Acuminate => "acuminate",
    Extended => "extended",
    NotApplicable => "not_applicable",
});

category!(BaseShape, "base_shape" {
    Straight => "straight",
    Concave => "concave",
    Convex => "convex",
    Cordate => "cordate",
    Lobate => "lobate",
    NotApplicable => "not_applicable",
});

impl LwClass {
    pub fn from_ratio(r: f64) -> Self {
        match r {
            r if r < 1.0 => Self::Below1,
            r if r < 2.0 => Self::From1To2,
            r if r < 3.0 => Self::From2To3,
            r if r < 10.0 => Self::From3To10,
            _ => Self::From10,
        }
    }
}

impl LobeCount {
    /// Bucketed lobe count; 1 is not a valid count and maps to `Zero`.
    pub fn from_count(n: usize) -> Self {
        match n {
            0 | 1 => Self::Zero,
            2 => Self::Two,
            3 => Self::Three,
            4 => Self::Four,
            5 => Self::Five,
            6 => Self::Six,
            _ => Self::SevenPlus,
        }
    }
}

impl AngleClass {
    pub fn from_degrees(deg: f64) -> Self {
        if deg > 180.0 {
            Self::Reflex
        } else if deg < 90.0 {
            Self::Acute
        } else {
            Self::Obtuse
        }
    }
}
