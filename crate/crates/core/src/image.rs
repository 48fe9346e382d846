//! Exact images of level-`n` approximants `F_n^k` under the symmetric maps
//! `x_1^2 + ... + x_k^2` and `x_1 + ... + x_k`, and under `x_1 - (x_2 + ... + x_k)`.
//!
//! Each image is the union, over all choices of `k` basic intervals, of the
//! image of the corresponding box. Symmetric maps enumerate sorted multisets
//! of interval indices (`C(2^n + k - 1, k)` boxes instead of `2^(nk)`); the
//! difference map enumerates its first coordinate freely and the rest as a
//! multiset. Work is split over the first index and merged with
//! [`IntervalUnion::union`], which is associative and commutative, so the
//! result does not depend on scheduling.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cantor::{level_intervals, CantorParams, DEFAULT_LEVEL_CAP};
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::rational::to_pq;
use crate::scalar::Scalar;
use crate::union::IntervalUnion;
use crate::Rational;

/// Default cap on boxes enumerated per request.
pub const DEFAULT_BOX_CAP: u128 = 1 << 22;

const FLUSH_AT: usize = 1 << 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ImageMap {
    /// `x_1^2 + ... + x_k^2`.
    #[serde(rename = "sq")]
    SumOfSquares,
    /// `x_1 + ... + x_k`.
    #[serde(rename = "sum")]
    Sum,
    /// `x_1 - x_2 - ... - x_k`.
    #[serde(rename = "diff")]
    Difference,
}

impl ImageMap {
    pub fn name(self) -> &'static str {
        match self {
            ImageMap::SumOfSquares => "sq",
            ImageMap::Sum => "sum",
            ImageMap::Difference => "diff",
        }
    }
}

impl fmt::Display for ImageMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ImageMap {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sq" | "squares" | "sum-of-squares" => Ok(ImageMap::SumOfSquares),
            "sum" => Ok(ImageMap::Sum),
            "diff" | "difference" => Ok(ImageMap::Difference),
            other => Err(Error::Parse(format!("unknown map {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ImageRequest {
    pub level: usize,
    pub arity: usize,
    pub map: ImageMap,
}

impl ImageRequest {
    pub fn new(level: usize, arity: usize, map: ImageMap) -> Self {
        Self { level, arity, map }
    }

    pub fn squares(level: usize, arity: usize) -> Self {
        Self::new(level, arity, ImageMap::SumOfSquares)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ImageResult<T> {
    pub request: ImageRequest,
    pub union: IntervalUnion<T>,
    pub boxes_enumerated: u128,
    pub elapsed_ms: u128,
}

impl Serialize for ImageResult<Rational> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = s.serialize_map(Some(6))?;
        m.serialize_entry("level", &self.request.level)?;
        m.serialize_entry("arity", &self.request.arity)?;
        m.serialize_entry("map", &self.request.map)?;
        m.serialize_entry("union", &self.union)?;
        m.serialize_entry("measure", &to_pq(&self.union.measure()))?;
        m.serialize_entry("boxes_enumerated", &(self.boxes_enumerated as u64))?;
        m.serialize_entry("elapsed_ms", &(self.elapsed_ms as u64))?;
        m.end()
    }
}

/// `C(n + k - 1, k)`, saturating at `u128::MAX`.
pub fn multiset_count(n: u128, k: u128) -> u128 {
    if k == 0 {
        return 1;
    }
    if n == 0 {
        return 0;
    }
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n + i) / (i + 1) stays integral at every step.
        acc = match acc.checked_mul(n + i) {
            Some(v) => v / (i + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Boxes an image request enumerates at level `n`.
pub fn box_count(req: &ImageRequest) -> u128 {
    if req.level >= 127 {
        return u128::MAX;
    }
    let m = 1u128 << req.level;
    match req.map {
        ImageMap::SumOfSquares | ImageMap::Sum => multiset_count(m, req.arity as u128),
        ImageMap::Difference => m.saturating_mul(multiset_count(m, req.arity as u128 - 1)),
    }
}

/// Image computation bound to one parameter set, with a per-engine cache.
pub struct ImageEngine<T> {
    params: CantorParams<T>,
    box_cap: u128,
    level_cap: usize,
    cache: Mutex<HashMap<ImageRequest, Arc<ImageResult<T>>>>,
}

impl<T: Scalar> ImageEngine<T> {
    pub fn new(params: CantorParams<T>) -> Self {
        Self {
            params,
            box_cap: DEFAULT_BOX_CAP,
            level_cap: DEFAULT_LEVEL_CAP,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn with_box_cap(mut self, cap: u128) -> Self {
        self.box_cap = cap;
        self
    }

    pub fn with_level_cap(mut self, cap: usize) -> Self {
        self.level_cap = cap;
        self
    }

    pub fn params(&self) -> &CantorParams<T> {
        &self.params
    }

    pub fn box_cap(&self) -> u128 {
        self.box_cap
    }

    fn check(&self, req: &ImageRequest) -> Result<u128> {
        if !(1..=4).contains(&req.arity) {
            return Err(Error::UnsupportedArity(req.arity));
        }
        let count = box_count(req);
        if count > self.box_cap {
            return Err(Error::CapExceeded {
                what: "boxes per image request",
                requested: count.to_string(),
                cap: self.box_cap.to_string(),
            });
        }
        Ok(count)
    }

    /// `map(F_n^k)` as an exact normalized union.
    pub fn image(&self, req: &ImageRequest) -> Result<Arc<ImageResult<T>>> {
        let expected = self.check(req)?;
        if let Some(hit) = self.cache.lock().expect("cache poisoned").get(req) {
            return Ok(Arc::clone(hit));
        }
        let started = Instant::now();
        let sides = level_intervals(&self.params, req.level, self.level_cap)?;
        let (first, rest) = match req.map {
            ImageMap::SumOfSquares => {
                let squares = sides.iter().map(Interval::square).collect::<Result<Vec<_>>>()?;
                (squares.clone(), squares)
            }
            ImageMap::Sum => (sides.clone(), sides),
            ImageMap::Difference => {
                let negated: Vec<_> = sides.iter().map(Interval::neg).collect();
                (sides, negated)
            }
        };
        let symmetric = req.map != ImageMap::Difference;
        let (union, boxes) = match to_lattice(&first, &rest, req.arity) {
            Some((unit, first, rest)) => {
                let (union, boxes) = enumerate(&first, &rest, req.arity, symmetric);
                let union = IntervalUnion::normalize(union.into_parts().into_iter().map(|p| {
                    let (lo, hi) = p.into_bounds();
                    Interval::ordered(T::from_multiple(&unit, lo), T::from_multiple(&unit, hi))
                }));
                (union, boxes)
            }
            None => enumerate(&first, &rest, req.arity, symmetric),
        };
        if boxes != expected {
            return Err(Error::Inconsistency(format!(
                "enumerated {boxes} boxes, expected {expected}"
            )));
        }
        let result = Arc::new(ImageResult {
            request: *req,
            union,
            boxes_enumerated: boxes,
            elapsed_ms: started.elapsed().as_millis(),
        });
        self.cache
            .lock()
            .expect("cache poisoned")
            .insert(*req, Arc::clone(&result));
        Ok(result)
    }

    /// `image(n + 1) ⊆ image(n)`.
    pub fn nestedness_check(&self, n: usize, arity: usize, map: ImageMap) -> Result<bool> {
        let coarse = self.image(&ImageRequest::new(n, arity, map))?;
        let fine = self.image(&ImageRequest::new(n + 1, arity, map))?;
        Ok(fine.union.is_subset_of(&coarse.union))
    }

    /// Checks `claimed ⊆ g(F_n^k)` (sum of `k` squares) for `n = 1..=max_level`.
    pub fn cover_report(
        &self,
        claimed: &IntervalUnion<T>,
        arity: usize,
        max_level: usize,
    ) -> Result<CoverReport<T>> {
        let mut levels = Vec::with_capacity(max_level);
        for level in 1..=max_level {
            let image = self.image(&ImageRequest::squares(level, arity))?;
            levels.push(CoverLevel {
                level,
                contained: claimed.is_subset_of(&image.union),
                image_parts: image.union.len(),
                boxes_enumerated: image.boxes_enumerated,
            });
        }
        let pass = levels.iter().all(|l| l.contained);
        Ok(CoverReport {
            claimed: claimed.clone(),
            arity,
            levels,
            pass,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoverLevel {
    pub level: usize,
    pub contained: bool,
    pub image_parts: usize,
    pub boxes_enumerated: u128,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoverReport<T> {
    pub claimed: IntervalUnion<T>,
    pub arity: usize,
    pub levels: Vec<CoverLevel>,
    pub pass: bool,
}

impl Serialize for CoverReport<Rational> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = s.serialize_map(Some(4))?;
        m.serialize_entry("claimed", &self.claimed)?;
        m.serialize_entry("arity", &self.arity)?;
        m.serialize_entry("levels", &self.levels)?;
        m.serialize_entry("pass", &self.pass)?;
        m.end()
    }
}

/// Open interval `(lo, hi)`; the closure is stored with both ends flagged open.
#[derive(Clone, Debug, PartialEq)]
pub struct Gap<T> {
    pub closure: Interval<T>,
    pub open_lo: bool,
    pub open_hi: bool,
}

impl Serialize for Gap<Rational> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = s.serialize_map(Some(3))?;
        m.serialize_entry("closure", &self.closure)?;
        m.serialize_entry("open_lo", &self.open_lo)?;
        m.serialize_entry("open_hi", &self.open_hi)?;
        m.end()
    }
}

/// For `alpha < 3`, returns the open interval `(4 r^2, (1 - r)^2)` after
/// confirming that the level-1 four-square image misses it. That image
/// contains the full four-square set, so the gap witnesses that
/// `[0, 4]` is not covered. Returns `None` for `alpha >= 3`.
pub fn gap_check<T: Scalar>(params: &CantorParams<T>) -> Result<Option<Gap<T>>> {
    let r = params.ratio().clone();
    let lo = T::from_int(4) * r.square();
    let hi = params.one_minus_ratio().square();
    if params.is_thick() {
        if lo < hi {
            return Err(Error::Inconsistency(format!(
                "thick regime but 4r^2 = {lo} < (1-r)^2 = {hi}"
            )));
        }
        return Ok(None);
    }
    if lo >= hi {
        return Err(Error::Inconsistency(format!(
            "thin regime but 4r^2 = {lo} >= (1-r)^2 = {hi}"
        )));
    }
    let engine = ImageEngine::new(params.clone());
    let image = engine.image(&ImageRequest::squares(1, 4))?;
    if image.union.meets_open(&lo, &hi) {
        return Err(Error::Inconsistency(format!(
            "level-1 image {} meets the claimed gap ({lo}, {hi})",
            image.union
        )));
    }
    Ok(Some(Gap {
        closure: Interval::new(lo, hi)?,
        open_lo: true,
        open_hi: true,
    }))
}

struct Accumulator<T> {
    buffer: Vec<Interval<T>>,
    union: IntervalUnion<T>,
    count: u128,
}

impl<T: Scalar> Accumulator<T> {
    fn new() -> Self {
        Self {
            buffer: Vec::with_capacity(FLUSH_AT),
            union: IntervalUnion::empty(),
            count: 0,
        }
    }

    fn push(&mut self, item: Interval<T>) {
        self.count += 1;
        self.buffer.push(item);
        if self.buffer.len() >= FLUSH_AT {
            self.flush();
        }
    }

    fn flush(&mut self) {
        if self.buffer.is_empty() {
            return;
        }
        let block = IntervalUnion::normalize(self.buffer.drain(..));
        self.union = self.union.union(&block);
    }

    fn finish(mut self) -> (IntervalUnion<T>, u128) {
        self.flush();
        (self.union, self.count)
    }
}

/// Adds `remaining` more contributions with indices `>= start` to `partial`.
fn extend_multisets<T: Scalar>(
    contrib: &[Interval<T>],
    start: usize,
    remaining: usize,
    partial: &Interval<T>,
    acc: &mut Accumulator<T>,
) {
    if remaining == 0 {
        acc.push(partial.clone());
        return;
    }
    for j in start..contrib.len() {
        let next = partial.add(&contrib[j]);
        extend_multisets(contrib, j, remaining - 1, &next, acc);
    }
}

fn merge_all<T: Scalar>(parts: Vec<(IntervalUnion<T>, u128)>) -> (IntervalUnion<T>, u128) {
    parts
        .into_par_iter()
        .reduce(
            || (IntervalUnion::empty(), 0),
            |(a, n), (b, m)| (a.union(&b), n + m),
        )
}

/// Rewrites both contribution lists over one integer unit. The headroom
/// keeps every `arity`-fold sum inside `i128`.
#[allow(clippy::type_complexity)]
fn to_lattice<T: Scalar>(
    first: &[Interval<T>],
    rest: &[Interval<T>],
    arity: usize,
) -> Option<(T, Vec<Interval<i128>>, Vec<Interval<i128>>)> {
    let endpoints: Vec<T> = first
        .iter()
        .chain(rest)
        .flat_map(|p| [p.lo().clone(), p.hi().clone()])
        .collect();
    let headroom = usize::BITS - arity.leading_zeros() + 1;
    let (unit, ints) = T::common_unit(&endpoints, headroom)?;
    let mut pairs = ints
        .chunks_exact(2)
        .map(|c| Interval::ordered(c[0], c[1]));
    let first_ints: Vec<_> = pairs.by_ref().take(first.len()).collect();
    let rest_ints: Vec<_> = pairs.collect();
    Some((unit, first_ints, rest_ints))
}

/// Boxes are `first[i] + rest[j_2] + ... + rest[j_k]` with `j_2 <= ... <= j_k`;
/// `symmetric` additionally requires `i <= j_2` (then `first == rest`).
fn enumerate<T: Scalar>(
    first: &[Interval<T>],
    rest: &[Interval<T>],
    arity: usize,
    symmetric: bool,
) -> (IntervalUnion<T>, u128) {
    let parts: Vec<_> = (0..first.len())
        .into_par_iter()
        .map(|i| {
            let mut acc = Accumulator::new();
            let start = if symmetric { i } else { 0 };
            extend_multisets(rest, start, arity - 1, &first[i], &mut acc);
            acc.finish()
        })
        .collect();
    merge_all(parts)
}
