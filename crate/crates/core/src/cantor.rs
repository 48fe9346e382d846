//! The middle-1/alpha Cantor set as the attractor of `{r x, r x + 1 - r}`.
//!
//! Digits follow the two-map convention: `1` selects `x -> r x` and `2`
//! selects `x -> r x + 1 - r`. A word `s_1 ... s_n` addresses the level-`n`
//! basic interval `f_{s_1} o ... o f_{s_n}([0, 1])`, whose left endpoint is
//! `sum over k with s_k = 2 of (1 - r) r^(k-1)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::scalar::Scalar;
use crate::union::IntervalUnion;

/// Default cap on `2^n` for level enumeration.
pub const DEFAULT_LEVEL_CAP: usize = 1 << 20;

/// Shape parameters of `C_alpha`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CantorParams<T> {
    alpha: T,
    ratio: T,
}

impl<T: Scalar> CantorParams<T> {
    /// `r = (1 - 1/alpha) / 2`; requires `alpha > 1`.
    pub fn new(alpha: T) -> Result<Self> {
        if alpha <= T::one() {
            return Err(Error::AlphaTooSmall(alpha.to_string()));
        }
        let ratio = (T::one() - T::one() / alpha.clone()) * T::half();
        Ok(Self { alpha, ratio })
    }

    pub fn alpha(&self) -> &T {
        &self.alpha
    }

    /// The contraction ratio `r`.
    pub fn ratio(&self) -> &T {
        &self.ratio
    }

    /// `alpha >= 3`, equivalently `r >= 1/3`.
    pub fn is_thick(&self) -> bool {
        self.alpha >= T::from_int(3)
    }

    pub(crate) fn require_thick(&self, what: &'static str) -> Result<()> {
        if self.is_thick() {
            Ok(())
        } else {
            Err(Error::ThinRegime(what))
        }
    }

    /// `r^n`.
    pub fn ratio_pow(&self, n: usize) -> T {
        self.ratio.powu(n as u32)
    }

    /// `1 - r`, the left endpoint of the right first-level interval.
    pub fn one_minus_ratio(&self) -> T {
        T::one() - self.ratio.clone()
    }

    /// Length of the gap removed from a level-`n` basic interval.
    pub fn gap_length(&self, n: usize) -> T {
        self.ratio_pow(n) / self.alpha.clone()
    }
}

/// One IFS branch selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Digit {
    One,
    Two,
}

impl Digit {
    pub fn as_char(self) -> char {
        match self {
            Digit::One => '1',
            Digit::Two => '2',
        }
    }

    /// Ternary expansion digit for the alpha = 3 case.
    pub fn ternary_char(self) -> char {
        match self {
            Digit::One => '0',
            Digit::Two => '2',
        }
    }
}

/// Finite address over `{1, 2}`. The empty word denotes `[0, 1]`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<Digit>);

impl Word {
    pub fn new(digits: Vec<Digit>) -> Self {
        Self(digits)
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn repeat(digit: Digit, count: usize) -> Self {
        Self(vec![digit; count])
    }

    pub fn digits(&self) -> &[Digit] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, digit: Digit) {
        self.0.push(digit);
    }

    pub fn truncated(&self, len: usize) -> Word {
        Word(self.0[..len.min(self.0.len())].to_vec())
    }

    /// `prefix ++ self`: the image of this address under `f_prefix`.
    pub fn prefixed(&self, prefix: &Word) -> Word {
        let mut digits = prefix.0.clone();
        digits.extend_from_slice(&self.0);
        Word(digits)
    }

    pub fn concat(&self, suffix: &Word) -> Word {
        suffix.prefixed(self)
    }

    pub fn to_ternary(&self) -> String {
        self.0.iter().map(|d| d.ternary_char()).collect()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.0 {
            write!(f, "{}", d.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '1' => Ok(Digit::One),
                '2' => Ok(Digit::Two),
                other => Err(Error::Parse(format!("invalid digit {other:?} in word {s:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }
}

impl Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Which endpoint of the basic interval `f_prefix([0, 1])` a point names.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Tail {
    /// Digits `1` forever: the left endpoint.
    #[serde(rename = "L")]
    AllLeft,
    /// Digits `2` forever: the right endpoint.
    #[serde(rename = "R")]
    AllRight,
}

/// A point of `C_alpha` with an eventually constant address.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CantorPoint {
    pub prefix: Word,
    pub tail: Tail,
}

impl CantorPoint {
    pub fn left(prefix: Word) -> Self {
        Self {
            prefix,
            tail: Tail::AllLeft,
        }
    }

    pub fn right(prefix: Word) -> Self {
        Self {
            prefix,
            tail: Tail::AllRight,
        }
    }

    pub fn zero() -> Self {
        Self::left(Word::empty())
    }

    pub fn one() -> Self {
        Self::right(Word::empty())
    }

    /// `f_prefix` applied to this point.
    pub fn prefixed(&self, prefix: &Word) -> Self {
        Self {
            prefix: self.prefix.prefixed(prefix),
            tail: self.tail,
        }
    }
}

impl fmt::Display for CantorPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tail = match self.tail {
            Tail::AllLeft => "1",
            Tail::AllRight => "2",
        };
        write!(f, "{}({})^inf", self.prefix, tail)
    }
}

/// Level-`n` basic interval `[left, left + r^n]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BasicInterval<T> {
    pub left: T,
    pub level: usize,
}

impl<T: Scalar> BasicInterval<T> {
    pub fn root() -> Self {
        Self {
            left: T::zero(),
            level: 0,
        }
    }

    /// Checks that `left` lies in `L_level`.
    pub fn new(params: &CantorParams<T>, left: T, level: usize) -> Result<Self> {
        word_of_left_endpoint(params, &left, level)?;
        Ok(Self { left, level })
    }

    pub fn interval(&self, params: &CantorParams<T>) -> Interval<T> {
        let hi = self.left.clone() + params.ratio_pow(self.level);
        Interval::ordered(self.left.clone(), hi)
    }
}

pub fn word_left_endpoint<T: Scalar>(params: &CantorParams<T>, word: &Word) -> T {
    let step = params.one_minus_ratio();
    let mut scale = T::one();
    let mut acc = T::zero();
    for d in word.digits() {
        if *d == Digit::Two {
            acc = acc + step.clone() * scale.clone();
        }
        scale = scale * params.ratio().clone();
    }
    acc
}

pub fn point_value<T: Scalar>(params: &CantorParams<T>, point: &CantorPoint) -> T {
    let left = word_left_endpoint(params, &point.prefix);
    match point.tail {
        Tail::AllLeft => left,
        Tail::AllRight => left + params.ratio_pow(point.prefix.len()),
    }
}

/// Recovers the unique word of length `level` whose left endpoint is `value`.
///
/// Greedy: digit `k` is `2` iff the remainder is at least `(1 - r) r^(k-1)`,
/// which dominates every deeper contribution because `r < 1/2`.
pub fn word_of_left_endpoint<T: Scalar>(
    params: &CantorParams<T>,
    value: &T,
    level: usize,
) -> Result<Word> {
    let not_on_grid = || Error::NotOnGrid {
        value: value.to_string(),
        level,
    };
    let mut rest = value.clone();
    let mut step = params.one_minus_ratio();
    let mut digits = Vec::with_capacity(level);
    for _ in 0..level {
        if rest >= step {
            rest = rest - step.clone();
            digits.push(Digit::Two);
        } else {
            digits.push(Digit::One);
        }
        step = step * params.ratio().clone();
    }
    if rest.is_zero() {
        Ok(Word(digits))
    } else {
        Err(not_on_grid())
    }
}

fn check_level_cap(n: usize, cap: usize) -> Result<()> {
    if n >= usize::BITS as usize || (1usize << n) > cap {
        return Err(Error::CapExceeded {
            what: "level enumeration 2^n",
            requested: format!("2^{n}"),
            cap: cap.to_string(),
        });
    }
    Ok(())
}

/// `L_n` in increasing order, refusing `2^n > cap`.
pub fn level_left_endpoints<T: Scalar>(
    params: &CantorParams<T>,
    n: usize,
    cap: usize,
) -> Result<Vec<T>> {
    check_level_cap(n, cap)?;
    // L_{k+1} = r L_k  followed by  r L_k + (1 - r); both halves sorted.
    let shift = params.one_minus_ratio();
    let mut current = vec![T::zero()];
    for _ in 0..n {
        let low: Vec<T> = current
            .iter()
            .map(|u| u.clone() * params.ratio().clone())
            .collect();
        let high: Vec<T> = low.iter().map(|u| u.clone() + shift.clone()).collect();
        current = low;
        current.extend(high);
    }
    Ok(current)
}

/// All level-`n` basic intervals in increasing order.
pub fn level_intervals<T: Scalar>(
    params: &CantorParams<T>,
    n: usize,
    cap: usize,
) -> Result<Vec<Interval<T>>> {
    let width = params.ratio_pow(n);
    Ok(level_left_endpoints(params, n, cap)?
        .into_iter()
        .map(|u| {
            let hi = u.clone() + width.clone();
            Interval::ordered(u, hi)
        })
        .collect())
}

/// `F_n`, the union of all level-`n` basic intervals.
pub fn level_set<T: Scalar>(params: &CantorParams<T>, n: usize, cap: usize) -> Result<IntervalUnion<T>> {
    Ok(IntervalUnion::normalize(level_intervals(params, n, cap)?))
}

/// The two level-`(n+1)` basic intervals inside `b`.
pub fn children<T: Scalar>(
    params: &CantorParams<T>,
    b: &BasicInterval<T>,
) -> (BasicInterval<T>, BasicInterval<T>) {
    let right_left = b.left.clone() + params.one_minus_ratio() * params.ratio_pow(b.level);
    (
        BasicInterval {
            left: b.left.clone(),
            level: b.level + 1,
        },
        BasicInterval {
            left: right_left,
            level: b.level + 1,
        },
    )
}
