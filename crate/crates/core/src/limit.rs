use std::fmt;
use std::str::FromStr;

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

/// A positive cap or no cap at all.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Limit {
    Unlimited,
    At(usize),
}

impl Limit {
    pub fn get(self) -> Option<usize> {
        match self {
            Limit::Unlimited => None,
            Limit::At(n) => Some(n),
        }
    }

    /// `min(self, n)`.
    pub fn cap(self, n: usize) -> usize {
        match self {
            Limit::Unlimited => n,
            Limit::At(k) => k.min(n),
        }
    }

    pub fn exceeded_by(self, n: usize) -> bool {
        matches!(self, Limit::At(k) if n > k)
    }
}

impl fmt::Display for Limit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Limit::Unlimited => f.write_str("unlimited"),
            Limit::At(n) => write!(f, "{n}"),
        }
    }
}

impl FromStr for Limit {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "unlimited" | "inf" | "none" => Ok(Limit::Unlimited),
            t => match t.parse::<usize>() {
                Ok(0) => Err("limit must be at least 1 (use `unlimited` for no cap)".into()),
                Ok(n) => Ok(Limit::At(n)),
                Err(_) => Err(format!("`{s}` is neither a positive integer nor `unlimited`")),
            },
        }
    }
}

impl Serialize for Limit {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Limit::Unlimited => s.serialize_str("unlimited"),
            Limit::At(n) => s.serialize_u64(*n as u64),
        }
    }
}

impl<'de> Deserialize<'de> for Limit {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl de::Visitor<'_> for V {
            type Value = Limit;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a positive integer or \"unlimited\"")
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Limit, E> {
                if v == 0 {
                    Err(E::custom("limit must be at least 1"))
                } else {
                    Ok(Limit::At(v as usize))
                }
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Limit, E> {
                if v < 1 {
                    Err(E::custom("limit must be at least 1"))
                } else {
                    Ok(Limit::At(v as usize))
                }
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Limit, E> {
                v.parse().map_err(E::custom)
            }
        }
        d.deserialize_any(V)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_cap() {
        assert_eq!("unlimited".parse::<Limit>().unwrap(), Limit::Unlimited);
        assert_eq!("100".parse::<Limit>().unwrap(), Limit::At(100));
        assert!("0".parse::<Limit>().is_err());
        assert!("-3".parse::<Limit>().is_err());
        assert_eq!(Limit::At(5).cap(3), 3);
        assert_eq!(Limit::At(5).cap(30), 5);
        assert_eq!(Limit::Unlimited.cap(30), 30);
        assert!(Limit::At(5).exceeded_by(6));
        assert!(!Limit::Unlimited.exceeded_by(usize::MAX));
    }

    #[test]
    fn json_forms() {
        assert_eq!(serde_json::to_string(&Limit::At(3)).unwrap(), "3");
        assert_eq!(serde_json::to_string(&Limit::Unlimited).unwrap(), "\"unlimited\"");
        assert_eq!(serde_json::from_str::<Limit>("7").unwrap(), Limit::At(7));
        assert_eq!(serde_json::from_str::<Limit>("\"inf\"").unwrap(), Limit::Unlimited);
        assert!(serde_json::from_str::<Limit>("0").is_err());
    }
}
