//! Fixed-point decimal with four fractional digits.

use core::fmt;
use core::str::FromStr;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Non-negative decimal stored as an integer number of ten-thousandths.
///
/// Used for volumes (CBM) and air-charge weights (kg). Serialized as a string
/// with exactly four decimals, e.g. `"2.5000"`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fixed4(u64);

pub const SCALE: u64 = 10_000;

impl Fixed4 {
    pub const ZERO: Fixed4 = Fixed4(0);

    pub const fn from_raw(raw: u64) -> Self {
        Fixed4(raw)
    }

    pub const fn from_int(value: u64) -> Self {
        Fixed4(value * SCALE)
    }

    /// Raw value in ten-thousandths.
    pub const fn raw(self) -> u64 {
        self.0
    }

    /// Multiplies a per-unit rate by this quantity, rounding half up.
    pub fn mul_rate(self, rate: u64) -> u64 {
        mul_div_round(rate, self.0, SCALE)
    }
}

/// `a * b / d` rounded half up, computed without overflow.
pub fn mul_div_round(a: u64, b: u64, d: u64) -> u64 {
    let num = a as u128 * b as u128 + (d as u128) / 2;
    (num / d as u128) as u64
}

impl fmt::Display for Fixed4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{:04}", self.0 / SCALE, self.0 % SCALE)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid fixed-point decimal {0:?}: expected up to four fractional digits")]
pub struct ParseFixedError(pub alloc::string::String);

impl FromStr for Fixed4 {
    type Err = ParseFixedError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseFixedError(s.into());
        let (int, frac) = match s.split_once('.') {
            Some((i, f)) => (i, f),
            None => (s, ""),
        };
        if int.is_empty() || frac.len() > 4 {
            return Err(err());
        }
        if !int.bytes().all(|b| b.is_ascii_digit()) || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        let int: u64 = int.parse().map_err(|_| err())?;
        let mut frac_val = 0u64;
        for (i, b) in frac.bytes().enumerate() {
            frac_val += u64::from(b - b'0') * 10u64.pow(3 - i as u32);
        }
        int.checked_mul(SCALE)
            .and_then(|v| v.checked_add(frac_val))
            .map(Fixed4)
            .ok_or_else(err)
    }
}

impl Serialize for Fixed4 {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Fixed4 {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct FixedVisitor;

        impl Visitor<'_> for FixedVisitor {
            type Value = Fixed4;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a decimal string with at most four fractional digits")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Fixed4, E> {
                v.parse().map_err(E::custom)
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Fixed4, E> {
                v.checked_mul(SCALE)
                    .map(Fixed4)
                    .ok_or_else(|| E::custom("decimal out of range"))
            }
        }

        deserializer.deserialize_any(FixedVisitor)
    }
}
