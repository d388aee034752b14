use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not a prime in [2, 2^31)")]
    NotPrime(u64),
    #[error("cannot parse field tag {0:?}; expected `q` or `f:<prime>`")]
    BadTag(String),
}

/// The prime field `F_p` with `2 <= p < 2^31`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct PrimeField {
    p: u32,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self, FieldError> {
        if p < (1 << 31) && is_prime(p) {
            Ok(Self { p: p as u32 })
        } else {
            Err(FieldError::NotPrime(p))
        }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    /// Reduces a signed integer to `[0, p)`.
    #[inline]
    pub fn reduce(&self, v: i64) -> u32 {
        v.rem_euclid(self.p as i64) as u32
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + (self.p - b)
        }
    }

    pub fn pow(&self, mut base: u32, mut e: u64) -> u32 {
        let mut acc = 1u32 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse of a nonzero element.
    pub fn inv(&self, a: u32) -> u32 {
        debug_assert!(!a.is_multiple_of(self.p));
        self.pow(a, self.p as u64 - 2)
    }

    /// Multiplicative order of a nonzero element.
    pub fn order(&self, a: u32) -> u64 {
        let a = a % self.p;
        assert!(a != 0, "zero has no multiplicative order");
        let mut x = a;
        let mut k = 1u64;
        while x != 1 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    /// A primitive `n`-th root of unity, if `n | p - 1`.
    pub fn root_of_unity(&self, n: u64) -> Option<u32> {
        let m = self.p as u64 - 1;
        if n == 0 || !m.is_multiple_of(n) {
            return None;
        }
        (2..self.p.max(3))
            .chain(std::iter::once(1))
            .map(|g| self.pow(g % self.p, m / n))
            .find(|&r| r != 0 && self.order(r) == n)
    }
}

impl From<PrimeField> for u64 {
    fn from(f: PrimeField) -> u64 {
        f.p as u64
    }
}

impl TryFrom<u64> for PrimeField {
    type Error = FieldError;
    fn try_from(p: u64) -> Result<Self, FieldError> {
        Self::new(p)
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin; the witness set is exact for all `n < 3.3e24`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &w in &WITNESSES {
        if n.is_multiple_of(w) {
            return n == w;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Coefficient field: the rationals or a prime field. Serialized as its
/// tag, `q` or `f:<p>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Field {
    Rational,
    Prime(PrimeField),
}

impl Field {
    pub fn gf(p: u64) -> Result<Self, FieldError> {
        Ok(Field::Prime(PrimeField::new(p)?))
    }

    /// Characteristic; `0` for the rationals.
    pub fn characteristic(&self) -> u32 {
        match self {
            Field::Rational => 0,
            Field::Prime(f) => f.p(),
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rational => write!(f, "q"),
            Field::Prime(k) => write!(f, "f:{}", k.p()),
        }
    }
}

impl From<Field> for String {
    fn from(f: Field) -> String {
        f.to_string()
    }
}

impl TryFrom<String> for Field {
    type Error = FieldError;
    fn try_from(s: String) -> Result<Self, FieldError> {
        s.parse()
    }
}

impl FromStr for Field {
    type Err = FieldError;
    fn from_str(s: &str) -> Result<Self, FieldError> {
        let t = s.trim().to_ascii_lowercase();
        if t == "q" {
            return Ok(Field::Rational);
        }
        let p = t
            .strip_prefix("f:")
            .and_then(|p| p.parse::<u64>().ok())
            .ok_or_else(|| FieldError::BadTag(s.to_string()))?;
        Field::gf(p)
    }
}
