//! Closed intervals with scalar endpoints.

use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::{parse_rational, to_pq};
use crate::scalar::Scalar;
use crate::Rational;

/// Closed interval `[lo, hi]` with `lo <= hi`. Points are allowed.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Interval<T> {
    lo: T,
    hi: T,
}

impl<T: Scalar> Interval<T> {
    pub fn new(lo: T, hi: T) -> Result<Self> {
        if lo > hi {
            return Err(Error::MalformedInterval {
                lo: lo.to_string(),
                hi: hi.to_string(),
            });
        }
        Ok(Self { lo, hi })
    }

    /// Builds `[lo, hi]` from endpoints the caller knows to be ordered.
    pub(crate) fn ordered(lo: T, hi: T) -> Self {
        debug_assert!(lo <= hi, "unordered endpoints {lo} > {hi}");
        Self { lo, hi }
    }

    pub fn point(value: T) -> Self {
        Self {
            lo: value.clone(),
            hi: value,
        }
    }

    pub fn lo(&self) -> &T {
        &self.lo
    }

    pub fn hi(&self) -> &T {
        &self.hi
    }

    pub fn into_bounds(self) -> (T, T) {
        (self.lo, self.hi)
    }

    pub fn width(&self) -> T {
        self.hi.clone() - self.lo.clone()
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: &T) -> bool {
        self.lo <= *x && *x <= self.hi
    }

    pub fn contains_interval(&self, other: &Self) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    /// True when the two closed intervals share at least one point.
    pub fn meets(&self, other: &Self) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            lo: self.lo.clone() + other.lo.clone(),
            hi: self.hi.clone() + other.hi.clone(),
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            lo: -self.hi.clone(),
            hi: -self.lo.clone(),
        }
    }

    pub fn shift(&self, by: &T) -> Self {
        Self {
            lo: self.lo.clone() + by.clone(),
            hi: self.hi.clone() + by.clone(),
        }
    }

    pub fn scale(&self, t: &T) -> Self {
        let a = self.lo.clone() * t.clone();
        let b = self.hi.clone() * t.clone();
        if a <= b {
            Self { lo: a, hi: b }
        } else {
            Self { lo: b, hi: a }
        }
    }

    /// Image of the interval under `x -> x^2`, requiring `lo >= 0`.
    pub fn square(&self) -> Result<Self> {
        if self.lo.is_negative() {
            return Err(Error::NegativeEndpoint(self.lo.to_string()));
        }
        Ok(Self {
            lo: self.lo.square(),
            hi: self.hi.square(),
        })
    }
}

impl<T: Scalar> fmt::Display for Interval<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// `[lo_1^2 + ... + lo_k^2, hi_1^2 + ... + hi_k^2]`: the exact image of a box
/// with nonnegative sides under the sum-of-squares map.
pub fn box_sum_of_squares_image<T: Scalar>(sides: &[Interval<T>]) -> Result<Interval<T>> {
    if sides.is_empty() || sides.len() > 4 {
        return Err(Error::UnsupportedArity(sides.len()));
    }
    let mut lo = T::zero();
    let mut hi = T::zero();
    for side in sides {
        let sq = side.square()?;
        lo = lo + sq.lo;
        hi = hi + sq.hi;
    }
    Ok(Interval { lo, hi })
}

impl Serialize for Interval<Rational> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [to_pq(&self.lo), to_pq(&self.hi)].serialize(s)
    }
}

impl<'de> Deserialize<'de> for Interval<Rational> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [lo, hi] = <[String; 2]>::deserialize(d)?;
        let lo = parse_rational(&lo).map_err(D::Error::custom)?;
        let hi = parse_rational(&hi).map_err(D::Error::custom)?;
        Interval::new(lo, hi).map_err(D::Error::custom)
    }
}
