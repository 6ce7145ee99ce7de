//! Extended exponents in (0, ∞] and the derived index arithmetic.
//!
//! An exponent is stored by its reciprocal, so the index relations
//! 1/r = 1/q − 1/p and 1/p + 1/p* = 1 become single subtractions and the
//! point at infinity is the exact value 0 rather than a large float.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// An exponent p ∈ (0, ∞], compared and combined through 1/p.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponent {
    inv: f64,
}

impl Exponent {
    pub const INFINITY: Exponent = Exponent { inv: 0.0 };
    pub const ONE: Exponent = Exponent { inv: 1.0 };
    pub const TWO: Exponent = Exponent { inv: 0.5 };

    /// Builds an exponent from its value; `f64::INFINITY` is accepted.
    pub fn new(value: f64) -> Result<Self> {
        if value.is_nan() {
            return Err(Error::InvalidExponent(value));
        }
        if value <= 0.0 {
            return Err(Error::NonPositiveExponent(value));
        }
        if value.is_infinite() {
            return Ok(Self::INFINITY);
        }
        Self::from_inv(1.0 / value)
    }

    /// Builds an exponent from its reciprocal; 0 means ∞.
    pub fn from_inv(inv: f64) -> Result<Self> {
        if !inv.is_finite() || inv < 0.0 {
            return Err(Error::InvalidExponent(if inv == 0.0 {
                f64::INFINITY
            } else {
                1.0 / inv
            }));
        }
        // canonicalize -0.0
        let inv = if inv == 0.0 { 0.0 } else { inv };
        Ok(Self { inv })
    }

    pub fn value(self) -> f64 {
        if self.inv == 0.0 {
            f64::INFINITY
        } else {
            1.0 / self.inv
        }
    }

    pub fn inv(self) -> f64 {
        self.inv
    }

    pub fn is_infinite(self) -> bool {
        self.inv == 0.0
    }

    pub fn is_finite(self) -> bool {
        self.inv != 0.0
    }

    /// Conjugate exponent p* with 1/p + 1/p* = 1; defined for p ≥ 1.
    pub fn conjugate(self) -> Result<Exponent> {
        if self.inv > 1.0 {
            return Err(Error::ConjugateUndefined(self.value()));
        }
        Ok(Exponent {
            inv: 1.0 - self.inv,
        })
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        // reciprocals reverse the order
        other.inv.partial_cmp(&self.inv)
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            write!(f, "inf")
        } else {
            write!(f, "{}", self.value())
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinity") {
            return Ok(Self::INFINITY);
        }
        if let Some((num, den)) = t.split_once('/') {
            let num: f64 = num
                .trim()
                .parse()
                .map_err(|_| Error::ParseExponent(s.to_string()))?;
            let den: f64 = den
                .trim()
                .parse()
                .map_err(|_| Error::ParseExponent(s.to_string()))?;
            if !(num > 0.0 && den > 0.0 && num.is_finite() && den.is_finite()) {
                return Err(Error::ParseExponent(s.to_string()));
            }
            // den/num is exact for the usual small fractions (3/4, 2/5, ...)
            return Self::from_inv(den / num);
        }
        let v: f64 = t.parse().map_err(|_| Error::ParseExponent(s.to_string()))?;
        Self::new(v)
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_infinite() {
            serializer.serialize_str("inf")
        } else {
            serializer.serialize_f64(self.value())
        }
    }
}

struct ExponentVisitor;

impl Visitor<'_> for ExponentVisitor {
    type Value = Exponent;

    fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "a positive number, a fraction string like \"4/3\", or \"inf\""
        )
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Exponent, E> {
        Exponent::new(v).map_err(E::custom)
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Exponent, E> {
        Exponent::new(v as f64).map_err(E::custom)
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Exponent, E> {
        Exponent::new(v as f64).map_err(E::custom)
    }

    fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Exponent, E> {
        v.parse().map_err(E::custom)
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        deserializer.deserialize_any(ExponentVisitor)
    }
}

/// A pair (p, q) with q ≤ p and the indices derived from it:
/// 1/r = 1/q − 1/p, 1/s = 1/(2r) + 1/4, and the conjugates where defined.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentPair {
    pub p: Exponent,
    pub q: Exponent,
    pub r: Exponent,
    pub s: Exponent,
    pub p_conj: Option<Exponent>,
    pub q_conj: Option<Exponent>,
}

impl ExponentPair {
    /// Fails when q > p, where r would be negative.
    pub fn new(p: Exponent, q: Exponent) -> Result<Self> {
        if q.inv < p.inv {
            return Err(Error::PairOrder {
                p: p.value(),
                q: q.value(),
            });
        }
        let r = Exponent::from_inv(q.inv - p.inv)?;
        let s = Exponent::from_inv(0.5 * r.inv + 0.25)?;
        Ok(Self {
            p,
            q,
            r,
            s,
            p_conj: p.conjugate().ok(),
            q_conj: q.conjugate().ok(),
        })
    }

    /// The adjoint pair (q*, p*); requires p, q ≥ 1.
    pub fn dual(&self) -> Result<ExponentPair> {
        let p_conj = self
            .p_conj
            .ok_or(Error::ConjugateUndefined(self.p.value()))?;
        let q_conj = self
            .q_conj
            .ok_or(Error::ConjugateUndefined(self.q.value()))?;
        ExponentPair::new(q_conj, p_conj)
    }
}

impl fmt::Display for ExponentPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.p, self.q)
    }
}
