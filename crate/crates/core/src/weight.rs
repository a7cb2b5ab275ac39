//! Fixed-point weights in milliunits.
//!
//! Every node and edge weight is carried as an integer number of thousandths
//! so that path weights compare exactly and ties are never produced by
//! floating-point rounding.

use std::fmt;
use std::iter::Sum;
use std::ops::Add;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// A non-negative weight stored as milliunits (`2.5` is `Weight(2500)`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Weight(pub u64);

impl Weight {
    pub const ZERO: Weight = Weight(0);
    pub const ONE: Weight = Weight(1000);

    pub fn from_milli(milli: u64) -> Self {
        Weight(milli)
    }

    pub fn milli(self) -> u64 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64 / 1000.0
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }
}

/// Parses a decimal string with at most three fractional digits into signed
/// milliunits. Signs are accepted here so that validation can report
/// negative weights as non-positive rather than as malformed.
pub fn parse_milli(text: &str) -> Result<i64, Error> {
    let malformed = || Error::MalformedWeight(text.to_string());
    let s = text.trim();
    let (negative, digits) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((i, f)) => (i, f),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(malformed());
    }
    if frac_part.len() > 3
        || !int_part.bytes().all(|b| b.is_ascii_digit())
        || !frac_part.bytes().all(|b| b.is_ascii_digit())
    {
        return Err(malformed());
    }
    let int_value: i64 = if int_part.is_empty() {
        0
    } else {
        int_part.parse().map_err(|_| malformed())?
    };
    let mut frac_value: i64 = 0;
    for (i, b) in frac_part.bytes().enumerate() {
        frac_value += i64::from(b - b'0') * 10_i64.pow(2 - i as u32);
    }
    let milli = int_value
        .checked_mul(1000)
        .and_then(|v| v.checked_add(frac_value))
        .ok_or_else(malformed)?;
    Ok(if negative { -milli } else { milli })
}

impl FromStr for Weight {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let milli = parse_milli(s)?;
        if milli <= 0 {
            return Err(Error::NonPositiveWeight(s.to_string()));
        }
        Ok(Weight(milli as u64))
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{:03}", self.0 / 1000, self.0 % 1000)
    }
}

impl Add for Weight {
    type Output = Weight;

    fn add(self, rhs: Weight) -> Weight {
        Weight(self.0 + rhs.0)
    }
}

impl Sum for Weight {
    fn sum<I: Iterator<Item = Weight>>(iter: I) -> Weight {
        iter.fold(Weight::ZERO, Add::add)
    }
}

impl Serialize for Weight {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Weight {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        let milli = parse_milli(&s).map_err(serde::de::Error::custom)?;
        if milli < 0 {
            return Err(serde::de::Error::custom(format!("negative weight {s}")));
        }
        Ok(Weight(milli as u64))
    }
}
