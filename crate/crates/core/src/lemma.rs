//! Boxes `I_u x I_v x I_w` of level-`n` basic intervals under
//! `g(x, y, z) = x^2 + y^2 + z^2`, and the two conditions that make their
//! images subdividable without losing coverage.
//!
//! * The overlap condition (`max > 0` and
//!   `4 (1 - r) max <= 2 (u + v + w) + (1 + 2r) r^n`) guarantees that the
//!   eight child boxes have images whose union is the whole parent image.
//! * The invariance condition
//!   (`2 (1 - r) max + (1 - 2r) r^n <= u + v + w`) implies the overlap
//!   condition and is inherited by every child box, so a point of the parent
//!   image can be chased down an infinite chain of nested boxes.
//!
//! Both require `alpha >= 3`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cantor::{word_of_left_endpoint, CantorParams, Word};
use crate::error::{Error, Result};
use crate::interval::{box_sum_of_squares_image, Interval};
use crate::scalar::{max_of, Scalar};
use crate::union::IntervalUnion;

/// `I_u x I_v x I_w` with `u, v, w` in `L_n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TripleBox<T> {
    coords: [T; 3],
    level: usize,
}

impl<T: Scalar> TripleBox<T> {
    /// Validates that each coordinate is a level-`n` left endpoint.
    pub fn new(params: &CantorParams<T>, coords: [T; 3], level: usize) -> Result<Self> {
        for c in &coords {
            word_of_left_endpoint(params, c, level)?;
        }
        Ok(Self { coords, level })
    }

    pub(crate) fn trusted(coords: [T; 3], level: usize) -> Self {
        Self { coords, level }
    }

    pub fn coords(&self) -> &[T; 3] {
        &self.coords
    }

    pub fn level(&self) -> usize {
        self.level
    }

    /// `u^2 + v^2 + w^2`.
    pub fn t(&self) -> T {
        self.coords
            .iter()
            .fold(T::zero(), |acc, c| acc + c.square())
    }

    pub fn sum(&self) -> T {
        self.coords
            .iter()
            .fold(T::zero(), |acc, c| acc + c.clone())
    }

    pub fn max(&self) -> T {
        max_of(&self.coords)
    }

    pub fn words(&self, params: &CantorParams<T>) -> Result<[Word; 3]> {
        let [a, b, c] = &self.coords;
        Ok([
            word_of_left_endpoint(params, a, self.level)?,
            word_of_left_endpoint(params, b, self.level)?,
            word_of_left_endpoint(params, c, self.level)?,
        ])
    }

    pub fn sides(&self, params: &CantorParams<T>) -> [Interval<T>; 3] {
        let width = params.ratio_pow(self.level);
        self.coords
            .clone()
            .map(|c| Interval::ordered(c.clone(), c + width.clone()))
    }

    /// `g(I_u x I_v x I_w) = [t, t + 2 (u + v + w) r^n + 3 r^(2n)]`.
    pub fn image(&self, params: &CantorParams<T>) -> Interval<T> {
        box_sum_of_squares_image(&self.sides(params)).expect("grid boxes are nonnegative")
    }

    pub fn child(&self, params: &CantorParams<T>, index: ChildIndex) -> TripleBox<T> {
        let step = params.one_minus_ratio() * params.ratio_pow(self.level);
        let mut coords = self.coords.clone();
        for (c, bit) in coords.iter_mut().zip(index.bits()) {
            if bit == 1 {
                *c = c.clone() + step.clone();
            }
        }
        TripleBox {
            coords,
            level: self.level + 1,
        }
    }
}

impl<T: Scalar> fmt::Display for TripleBox<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = &self.coords;
        write!(f, "({a}, {b}, {c})@{}", self.level)
    }
}

/// Which child `(i, j, l)` of each coordinate: `0` keeps the left endpoint,
/// `1` moves to the right sub-interval.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ChildIndex(u8);

impl ChildIndex {
    /// All eight indices in lexicographic `(i, j, l)` order.
    pub const ALL: [ChildIndex; 8] = [
        ChildIndex(0),
        ChildIndex(1),
        ChildIndex(2),
        ChildIndex(3),
        ChildIndex(4),
        ChildIndex(5),
        ChildIndex(6),
        ChildIndex(7),
    ];

    pub fn new(i: u8, j: u8, l: u8) -> Self {
        assert!(i <= 1 && j <= 1 && l <= 1, "child bits are 0 or 1");
        ChildIndex(i << 2 | j << 1 | l)
    }

    pub fn bits(self) -> [u8; 3] {
        [self.0 >> 2 & 1, self.0 >> 1 & 1, self.0 & 1]
    }
}

impl fmt::Display for ChildIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [i, j, l] = self.bits();
        write!(f, "{i}{j}{l}")
    }
}

impl FromStr for ChildIndex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits: Vec<u8> = s
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(Error::Parse(format!("invalid child index {s:?}"))),
            })
            .collect::<Result<_>>()?;
        match bits[..] {
            [i, j, l] => Ok(ChildIndex::new(i, j, l)),
            _ => Err(Error::Parse(format!("child index needs three bits: {s:?}"))),
        }
    }
}

impl Serialize for ChildIndex {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ChildIndex {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

pub fn cond_overlap<T: Scalar>(params: &CantorParams<T>, b: &TripleBox<T>) -> Result<bool> {
    params.require_thick("overlap condition")?;
    let r = params.ratio().clone();
    let max = b.max();
    if !max.is_positive() {
        return Ok(false);
    }
    let lhs = T::from_int(4) * (T::one() - r.clone()) * max;
    let rhs = T::from_int(2) * b.sum()
        + (T::one() + T::from_int(2) * r) * params.ratio_pow(b.level);
    Ok(lhs <= rhs)
}

pub fn cond_invariant<T: Scalar>(params: &CantorParams<T>, b: &TripleBox<T>) -> Result<bool> {
    params.require_thick("invariance condition")?;
    Ok(invariant_slack(params, b) >= T::zero())
}

/// `u + v + w - 2 (1 - r) max - (1 - 2r) r^n`; nonnegative iff the
/// invariance condition holds.
pub fn invariant_slack<T: Scalar>(params: &CantorParams<T>, b: &TripleBox<T>) -> T {
    let r = params.ratio().clone();
    let two = T::from_int(2);
    b.sum()
        - two.clone() * (T::one() - r.clone()) * b.max()
        - (T::one() - two * r) * params.ratio_pow(b.level)
}

/// Images of the eight child boxes, computed directly from their sides.
pub fn child_box_images<T: Scalar>(
    params: &CantorParams<T>,
    b: &TripleBox<T>,
) -> Vec<(ChildIndex, Interval<T>)> {
    ChildIndex::ALL
        .iter()
        .map(|&idx| (idx, b.child(params, idx).image(params)))
        .collect()
}

/// The eight child images written out as polynomials in `u, v, w, r^n`.
/// Independent of [`child_box_images`]; the two must agree exactly.
pub fn closed_form_child_image<T: Scalar>(
    params: &CantorParams<T>,
    b: &TripleBox<T>,
    index: ChildIndex,
) -> Interval<T> {
    let [u, v, w] = b.coords.clone();
    let r = params.ratio().clone();
    let rn = params.ratio_pow(b.level);
    let r2n = rn.square();
    let one = T::one();
    let two = T::from_int(2);
    let three = T::from_int(3);
    let s = one.clone() - r.clone();
    let t = b.t();
    let c = |k: i64| T::from_int(k);
    // Shorthands for the recurring constant terms.
    let one_2r2 = one.clone() + two.clone() * r.square();
    let two_r2 = two.clone() + r.square();
    let (lo, hi) = match index.bits() {
        [0, 0, 0] => (
            t.clone(),
            t + two.clone() * (u + v + w) * rn.clone() * r.clone()
                + three * r2n * r.square(),
        ),
        [0, 0, 1] => (
            t.clone() + two.clone() * w.clone() * s.clone() * rn.clone() + s.square() * r2n.clone(),
            t + two.clone() * (r.clone() * u + r.clone() * v + w) * rn + one_2r2 * r2n,
        ),
        [0, 1, 0] => (
            t.clone() + two.clone() * v.clone() * s.clone() * rn.clone() + s.square() * r2n.clone(),
            t + two.clone() * (r.clone() * u + v + r.clone() * w) * rn + one_2r2 * r2n,
        ),
        [0, 1, 1] => (
            t.clone()
                + two.clone() * (v.clone() + w.clone()) * s.clone() * rn.clone()
                + two.clone() * s.square() * r2n.clone(),
            t + two.clone() * (r.clone() * u + v + w) * rn + two_r2 * r2n,
        ),
        [1, 0, 0] => (
            t.clone() + two.clone() * u.clone() * s.clone() * rn.clone() + s.square() * r2n.clone(),
            t + two.clone() * (u + r.clone() * v + r.clone() * w) * rn + one_2r2 * r2n,
        ),
        [1, 0, 1] => (
            t.clone()
                + two.clone() * (u.clone() + w.clone()) * s.clone() * rn.clone()
                + two.clone() * s.square() * r2n.clone(),
            t + two.clone() * (u + r.clone() * v + w) * rn + two_r2 * r2n,
        ),
        [1, 1, 0] => (
            t.clone()
                + two.clone() * (u.clone() + v.clone()) * s.clone() * rn.clone()
                + two.clone() * s.square() * r2n.clone(),
            t + two.clone() * (u + v + r.clone() * w) * rn + two_r2 * r2n,
        ),
        [1, 1, 1] => (
            t.clone()
                + two.clone() * (u.clone() + v.clone() + w.clone()) * s.clone() * rn.clone()
                + c(3) * s.square() * r2n.clone(),
            t + two * (u + v + w) * rn + c(3) * r2n,
        ),
        _ => unreachable!("three bits"),
    };
    Interval::ordered(lo, hi)
}

/// Checks that the eight child images cover the parent image
/// `[t, t + 2 (u + v + w) r^n + 3 r^(2n)]` without a gap.
pub fn verify_overlap_lemma<T: Scalar>(params: &CantorParams<T>, b: &TripleBox<T>) -> Result<bool> {
    if !cond_overlap(params, b)? {
        return Err(Error::Precondition(format!(
            "overlap condition fails for {b}"
        )));
    }
    let union: IntervalUnion<T> = child_box_images(params, b)
        .into_iter()
        .map(|(_, image)| image)
        .collect();
    Ok(union == IntervalUnion::single(parent_closed_form(params, b)))
}

/// `[t, t + 2 (u + v + w) r^n + 3 r^(2n)]`.
pub fn parent_closed_form<T: Scalar>(params: &CantorParams<T>, b: &TripleBox<T>) -> Interval<T> {
    let rn = params.ratio_pow(b.level);
    let t = b.t();
    let hi = t.clone() + T::from_int(2) * b.sum() * rn.clone() + T::from_int(3) * rn.square();
    Interval::ordered(t, hi)
}

/// First child, in lexicographic `(i, j, l)` order, whose image contains `t`.
pub fn refine_step<T: Scalar>(
    params: &CantorParams<T>,
    b: &TripleBox<T>,
    t: &T,
) -> Result<ChildIndex> {
    if !cond_invariant(params, b)? {
        return Err(Error::Precondition(format!(
            "invariance condition fails for {b}"
        )));
    }
    if !b.image(params).contains(t) {
        return Err(Error::Precondition(format!("{t} outside the image of {b}")));
    }
    // Each child side is [c + bit * step, c + bit * step + width]; square the
    // four possible endpoints per coordinate once and sum per child.
    let rn = params.ratio_pow(b.level);
    let step = params.one_minus_ratio() * rn.clone();
    let width = rn * params.ratio().clone();
    let ends: Vec<[[T; 2]; 2]> = b
        .coords
        .iter()
        .map(|c| {
            let right = c.clone() + step.clone();
            [
                [c.square(), (c.clone() + width.clone()).square()],
                [right.square(), (right + width.clone()).square()],
            ]
        })
        .collect();
    ChildIndex::ALL
        .iter()
        .copied()
        .find(|idx| {
            let bits = idx.bits();
            let (lo, hi) = (0..3).fold((T::zero(), T::zero()), |(lo, hi), i| {
                let [l, h] = &ends[i][bits[i] as usize];
                (lo + l.clone(), hi + h.clone())
            });
            lo <= *t && *t <= hi
        })
        .ok_or_else(|| Error::Inconsistency(format!("no child of {b} covers {t}")))
}

/// One difference from the overlap argument, computed both as a
/// difference of child-image endpoints and from its simplified polynomial.
#[derive(Clone, Debug, PartialEq)]
pub struct Margin<T> {
    pub name: &'static str,
    pub difference: T,
    pub simplified: T,
    /// `true` when the claim is `> 0`, `false` for `>= 0`.
    pub strict: bool,
}

impl<T: Scalar> Margin<T> {
    pub fn holds(&self) -> bool {
        let signed = if self.strict {
            self.difference.is_positive()
        } else {
            !self.difference.is_negative()
        };
        signed && self.difference == self.simplified
    }
}

/// The six consecutive-child differences (upper end of one child image
/// minus lower end of the next) plus the join between the two halves, for the
/// box sorted so that `u >= v >= w`.
pub fn overlap_margins<T: Scalar>(
    params: &CantorParams<T>,
    b: &TripleBox<T>,
) -> Result<Vec<Margin<T>>> {
    params.require_thick("overlap margins")?;
    let mut sorted = b.coords.clone();
    sorted.sort_by(|x, y| y.partial_cmp(x).expect("ordered scalars"));
    let sorted = TripleBox::trusted(sorted, b.level);
    let [a, v, w] = sorted.coords.clone();
    let r = params.ratio().clone();
    let rn = params.ratio_pow(b.level);
    let r2n = rn.square();
    let two = T::from_int(2);
    let c = |k: i64| T::from_int(k);
    let img = |bits: (u8, u8, u8)| closed_form_child_image(params, &sorted, ChildIndex::new(bits.0, bits.1, bits.2));
    let gap = |upper: (u8, u8, u8), lower: (u8, u8, u8)| {
        img(upper).hi().clone() - img(lower).lo().clone()
    };

    // 2(ru + rv + 2rw - w) and 2(ru + 2rv - v + w)
    let p = two.clone()
        * (r.clone() * a.clone() + r.clone() * v.clone() + two.clone() * r.clone() * w.clone()
            - w.clone());
    let q = two.clone()
        * (r.clone() * a.clone() + two.clone() * r.clone() * v.clone() - v.clone() + w.clone());
    let r_sq = r.square();

    let margins = vec![
        Margin {
            name: "hi(100) - lo(101)",
            difference: gap((1, 0, 0), (1, 0, 1)),
            simplified: p.clone() * rn.clone() + (c(4) * r.clone() - c(1)) * r2n.clone(),
            strict: true,
        },
        Margin {
            name: "hi(101) - lo(110)",
            difference: gap((1, 0, 1), (1, 1, 0)),
            simplified: q.clone() * rn.clone() + (c(4) - r.clone()) * r2n.clone() * r.clone(),
            strict: true,
        },
        Margin {
            name: "hi(110) - lo(111)",
            difference: gap((1, 1, 0), (1, 1, 1)),
            simplified: p.clone() * rn.clone()
                + (c(6) * r.clone() - two.clone() * r_sq.clone() - c(1)) * r2n.clone(),
            strict: true,
        },
        Margin {
            name: "hi(000) - lo(001)",
            difference: gap((0, 0, 0), (0, 0, 1)),
            simplified: p.clone() * rn.clone()
                + (two.clone() * r_sq.clone() + two.clone() * r.clone() - c(1)) * r2n.clone(),
            strict: true,
        },
        Margin {
            name: "hi(001) - lo(010)",
            difference: gap((0, 0, 1), (0, 1, 0)),
            simplified: q * rn.clone() + (r.clone() + two.clone()) * r2n.clone() * r.clone(),
            strict: true,
        },
        Margin {
            name: "hi(010) - lo(011)",
            difference: gap((0, 1, 0), (0, 1, 1)),
            simplified: p * rn.clone() + (c(4) * r.clone() - c(1)) * r2n.clone(),
            strict: true,
        },
        Margin {
            name: "hi(011) - lo(100)",
            difference: gap((0, 1, 1), (1, 0, 0)),
            simplified: two.clone()
                * (v + w - (c(1) - two.clone() * r.clone()) * a)
                * rn
                + (c(1) + two * r) * r2n,
            strict: false,
        },
    ];
    Ok(margins)
}

/// Which known interval a base box realizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BaseFamily {
    /// `[a(r), b(r)]` from the level-2 box.
    #[serde(rename = "AB")]
    Ab,
    /// `[2 (1 - r)^2, 3]` from the two level-1 boxes.
    #[serde(rename = "MAIN")]
    Main,
}

impl fmt::Display for BaseFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BaseFamily::Ab => "AB",
            BaseFamily::Main => "MAIN",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BaseBox<T> {
    pub family: BaseFamily,
    pub triple: TripleBox<T>,
    pub image: Interval<T>,
}

/// `a(r) = 2r^4 - 4r^3 + 3r^2 - 2r + 1`.
pub fn poly_a<T: Scalar>(r: &T) -> T {
    let c = |k: i64| T::from_int(k);
    c(2) * r.powu(4) - c(4) * r.powu(3) + c(3) * r.powu(2) - c(2) * r.clone() + c(1)
}

/// `b(r) = r^4 - 2r^3 + 5r^2 - 2r + 1`.
pub fn poly_b<T: Scalar>(r: &T) -> T {
    let c = |k: i64| T::from_int(k);
    r.powu(4) - c(2) * r.powu(3) + c(5) * r.powu(2) - c(2) * r.clone() + c(1)
}

/// The three boxes whose images seed every known interval, in order:
/// `(0, 1-r, 1-r)` and `(1-r, 1-r, 1-r)` at level 1 (family MAIN), then
/// `(r - r^2, r - r^2, 1-r)` at level 2 (family AB). Each is checked against
/// the invariance condition.
pub fn base_boxes<T: Scalar>(params: &CantorParams<T>) -> Result<Vec<BaseBox<T>>> {
    params.require_thick("base boxes")?;
    let r = params.ratio().clone();
    let s = params.one_minus_ratio();
    let low = r.clone() - r.square();
    let specs = [
        (BaseFamily::Main, [T::zero(), s.clone(), s.clone()], 1),
        (BaseFamily::Main, [s.clone(), s.clone(), s.clone()], 1),
        (BaseFamily::Ab, [low.clone(), low, s], 2),
    ];
    specs
        .into_iter()
        .map(|(family, coords, level)| {
            let triple = TripleBox::new(params, coords, level)?;
            if !cond_invariant(params, &triple)? {
                return Err(Error::Inconsistency(format!(
                    "base box {triple} fails the invariance condition"
                )));
            }
            let image = triple.image(params);
            Ok(BaseBox {
                family,
                triple,
                image,
            })
        })
        .collect()
}
