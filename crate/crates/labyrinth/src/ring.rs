//! Coefficient rings: the integers modulo `m`, optionally flagged as a prime
//! field so that elimination-based operations are permitted.
//!
//! Every scalar handled by this crate is a canonical residue in `[0, m)`.

use std::fmt;
use std::str::FromStr;

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest modulus accepted; everything here is desk scale.
pub const MAX_MODULUS: u64 = 1 << 20;

/// A finite coefficient ring `Z/m`, or the field `F_p` when `field` is set.
///
/// `fp(p)` and `zmod(p)` share the same arithmetic; the flag records whether
/// field-only operations (inverses, elimination) are intended for this value.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct RingSpec {
    modulus: u64,
    field: bool,
}

impl RingSpec {
    /// The ring `Z/m`, `m >= 2`.
    pub fn zmod(m: u64) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidRing(format!("modulus {m} < 2")));
        }
        if m > MAX_MODULUS {
            return Err(Error::InvalidRing(format!("modulus {m} exceeds {MAX_MODULUS}")));
        }
        Ok(RingSpec { modulus: m, field: false })
    }

    /// The prime field `F_p`; primality is checked at construction.
    pub fn fp(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidRing(format!("{p} is not prime")));
        }
        if p > MAX_MODULUS {
            return Err(Error::InvalidRing(format!("modulus {p} exceeds {MAX_MODULUS}")));
        }
        Ok(RingSpec { modulus: p, field: true })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Whether field operations were requested at construction.
    pub fn is_field(&self) -> bool {
        self.field
    }

    /// Elimination is exact precisely when the modulus is prime, whether or
    /// not the value was declared as a field.
    pub fn has_prime_modulus(&self) -> bool {
        self.field || is_prime(self.modulus)
    }

    /// Rings with equal arithmetic (same modulus), ignoring the field flag.
    pub fn same_arithmetic(&self, other: &RingSpec) -> bool {
        self.modulus == other.modulus
    }

    pub fn normalize(&self, v: i64) -> u64 {
        let m = self.modulus as i64;
        (((v % m) + m) % m) as u64
    }

    pub fn normalize_u64(&self, v: u64) -> u64 {
        v % self.modulus
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        (a + b) % self.modulus
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        (a + self.modulus - b % self.modulus) % self.modulus
    }

    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.modulus - a % self.modulus
        }
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.modulus as u128) as u64
    }

    /// Multiplicative inverse of a unit, via the extended Euclidean algorithm.
    pub fn inv(&self, a: u64) -> Result<u64> {
        let a = a % self.modulus;
        let (g, x, _) = ext_gcd(a as i128, self.modulus as i128);
        if g != 1 {
            return Err(Error::Invariant(format!(
                "{a} is not invertible modulo {}",
                self.modulus
            )));
        }
        let m = self.modulus as i128;
        Ok((((x % m) + m) % m) as u64)
    }

    /// All residues `0..m`, in order.
    pub fn elements(&self) -> impl Iterator<Item = u64> {
        0..self.modulus
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = u64> {
        1..self.modulus
    }
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if a == 0 {
        (b, 0, 1)
    } else {
        let (g, x, y) = ext_gcd(b % a, a);
        (g, y - (b / a) * x, x)
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl fmt::Display for RingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.field {
            write!(f, "fp:{}", self.modulus)
        } else {
            write!(f, "zmod:{}", self.modulus)
        }
    }
}

impl FromStr for RingSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, m) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("ring `{s}`: expected `zmod:m` or `fp:p`")))?;
        let m: u64 = m
            .parse()
            .map_err(|_| Error::Parse(format!("ring `{s}`: bad modulus")))?;
        match kind {
            "zmod" => RingSpec::zmod(m),
            "fp" => RingSpec::fp(m),
            _ => Err(Error::Parse(format!("ring `{s}`: unknown kind `{kind}`"))),
        }
    }
}

impl Serialize for RingSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for RingSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(de::Error::custom)
    }
}
