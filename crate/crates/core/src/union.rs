//! Finite unions of disjoint closed intervals in canonical form.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Result;
use crate::interval::Interval;
use crate::scalar::Scalar;
use crate::Rational;

/// Sorted, pairwise disjoint closed intervals separated by strict gaps.
///
/// Intervals that overlap or share an endpoint are merged on construction, so
/// two unions describe the same set exactly when they compare equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntervalUnion<T> {
    parts: Vec<Interval<T>>,
}

impl<T: Scalar> Default for IntervalUnion<T> {
    fn default() -> Self {
        Self::empty()
    }
}

impl<T: Scalar> IntervalUnion<T> {
    pub fn empty() -> Self {
        Self { parts: Vec::new() }
    }

    pub fn single(interval: Interval<T>) -> Self {
        Self {
            parts: vec![interval],
        }
    }

    /// Validates `(lo, hi)` pairs and normalizes them.
    pub fn from_bounds<I>(bounds: I) -> Result<Self>
    where
        I: IntoIterator<Item = (T, T)>,
    {
        let intervals = bounds
            .into_iter()
            .map(|(lo, hi)| Interval::new(lo, hi))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::normalize(intervals))
    }

    /// Canonical union of arbitrary closed intervals.
    pub fn normalize<I>(intervals: I) -> Self
    where
        I: IntoIterator<Item = Interval<T>>,
    {
        let mut items: Vec<Interval<T>> = intervals.into_iter().collect();
        items.sort_by(|a, b| a.lo().partial_cmp(b.lo()).unwrap_or(Ordering::Equal));
        let mut parts: Vec<Interval<T>> = Vec::with_capacity(items.len());
        for next in items {
            if let Some(last) = parts.last_mut() {
                if next.lo() <= last.hi() {
                    if next.hi() > last.hi() {
                        *last = Interval::ordered(last.lo().clone(), next.hi().clone());
                    }
                    continue;
                }
            }
            parts.push(next);
        }
        Self { parts }
    }

    pub fn parts(&self) -> &[Interval<T>] {
        &self.parts
    }

    pub fn into_parts(self) -> Vec<Interval<T>> {
        self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn min(&self) -> Option<&T> {
        self.parts.first().map(Interval::lo)
    }

    pub fn max(&self) -> Option<&T> {
        self.parts.last().map(Interval::hi)
    }

    /// Index of the first part whose upper end is at least `x`.
    fn first_reaching(&self, x: &T) -> usize {
        self.parts.partition_point(|p| p.hi() < x)
    }

    /// `target` is a subset of the union. Since parts are separated by gaps,
    /// this holds iff a single part covers `target`.
    pub fn contains(&self, target: &Interval<T>) -> bool {
        let i = self.first_reaching(target.hi());
        self.parts
            .get(i)
            .is_some_and(|p| p.contains_interval(target))
    }

    pub fn contains_point(&self, x: &T) -> bool {
        self.contains(&Interval::point(x.clone()))
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.parts.iter().all(|p| other.contains(p))
    }

    /// True when some point of the union lies strictly between `lo` and `hi`.
    pub fn meets_open(&self, lo: &T, hi: &T) -> bool {
        self.parts.iter().any(|p| p.lo() < hi && p.hi() > lo)
    }

    /// Open gaps between consecutive parts, as closures `[a, b]`.
    pub fn gaps(&self) -> Vec<Interval<T>> {
        self.parts
            .windows(2)
            .map(|w| Interval::ordered(w[0].hi().clone(), w[1].lo().clone()))
            .collect()
    }

    /// Union with another canonical union by a linear merge.
    pub fn union(&self, other: &Self) -> Self {
        let mut merged = Vec::with_capacity(self.len() + other.len());
        let (mut a, mut b) = (self.parts.iter().peekable(), other.parts.iter().peekable());
        loop {
            let next = match (a.peek(), b.peek()) {
                (Some(x), Some(y)) => {
                    if x.lo() <= y.lo() {
                        a.next()
                    } else {
                        b.next()
                    }
                }
                (Some(_), None) => a.next(),
                (None, Some(_)) => b.next(),
                (None, None) => break,
            };
            merged.push(next.cloned().expect("peeked"));
        }
        // Already sorted; normalize only merges neighbours.
        Self::normalize(merged)
    }

    /// `t * U` for any scalar `t`; `t = 0` collapses a nonempty union to `{0}`.
    pub fn scale(&self, t: &T) -> Self {
        Self::normalize(self.parts.iter().map(|p| p.scale(t)))
    }

    pub fn shift(&self, by: &T) -> Self {
        Self {
            parts: self.parts.iter().map(|p| p.shift(by)).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            parts: self.parts.iter().rev().map(Interval::neg).collect(),
        }
    }

    /// `{u + v : u in U, v in V}`.
    pub fn minkowski_sum(&self, other: &Self) -> Self {
        let mut acc = Self::empty();
        for p in &self.parts {
            let shifted = Self::normalize(other.parts.iter().map(|q| p.add(q)));
            acc = acc.union(&shifted);
        }
        acc
    }

    /// Total length.
    pub fn measure(&self) -> T {
        self.parts
            .iter()
            .fold(T::zero(), |acc, p| acc + p.width())
    }

    pub fn hull(&self) -> Option<Interval<T>> {
        match (self.parts.first(), self.parts.last()) {
            (Some(first), Some(last)) => {
                Some(Interval::ordered(first.lo().clone(), last.hi().clone()))
            }
            _ => None,
        }
    }
}

impl<T: Scalar> FromIterator<Interval<T>> for IntervalUnion<T> {
    fn from_iter<I: IntoIterator<Item = Interval<T>>>(iter: I) -> Self {
        Self::normalize(iter)
    }
}

impl<T: Scalar> fmt::Display for IntervalUnion<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return write!(f, "{{}}");
        }
        let body: Vec<String> = self.parts.iter().map(ToString::to_string).collect();
        write!(f, "{{{}}}", body.join(", "))
    }
}

impl Serialize for IntervalUnion<Rational> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.parts.serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntervalUnion<Rational> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let parts = Vec::<Interval<Rational>>::deserialize(d)?;
        Ok(Self::normalize(parts))
    }
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn union(bounds: &[((i64, i64), (i64, i64))]) -> IntervalUnion<Rational> {
        IntervalUnion::from_bounds(bounds.iter().map(|&(a, b)| (q(a.0, a.1), q(b.0, b.1))))
            .unwrap()
    }

    fn third_level_one() -> IntervalUnion<Rational> {
        union(&[((0, 1), (1, 3)), ((2, 3), (1, 1))])
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(
            union(&[((0, 1), (1, 1)), ((1, 1), (2, 1))]),
            union(&[((0, 1), (2, 1))])
        );
        assert_eq!(third_level_one().len(), 2);
        assert_eq!(
            union(&[((8, 9), (19, 9)), ((4, 3), (3, 1))]),
            union(&[((8, 9), (3, 1))])
        );
        assert!(IntervalUnion::from_bounds([(q(1, 1), q(0, 1))]).is_err());
        assert!(IntervalUnion::<Rational>::normalize([]).is_empty());
    }

    #[test]
    fn contains_examples() {
        let whole = union(&[((0, 1), (2, 1))]);
        assert!(whole.contains(&Interval::new(q(1, 2), q(1, 1)).unwrap()));
        assert!(!third_level_one().contains(&Interval::new(q(1, 3), q(2, 3)).unwrap()));
        assert!(third_level_one().contains_point(&q(1, 3)));
        assert!(!third_level_one().contains_point(&q(1, 2)));
        assert!(!IntervalUnion::empty().contains_point(&q(0, 1)));
    }

    #[test]
    fn scale_examples() {
        assert_eq!(
            union(&[((1, 1), (2, 1))]).scale(&q(1, 9)),
            union(&[((1, 9), (2, 9))])
        );
        assert_eq!(
            union(&[((8, 9), (3, 1))]).scale(&q(1, 9)),
            union(&[((8, 81), (1, 3))])
        );
        assert_eq!(
            union(&[((0, 1), (4, 1))]).scale(&q(0, 1)),
            union(&[((0, 1), (0, 1))])
        );
        assert_eq!(
            third_level_one().scale(&q(-1, 1)),
            union(&[((-1, 1), (-2, 3)), ((-1, 3), (0, 1))])
        );
    }

    #[test]
    fn minkowski_examples() {
        let f1 = third_level_one();
        assert_eq!(f1.minkowski_sum(&f1), union(&[((0, 1), (2, 1))]));
        assert_eq!(f1.minkowski_sum(&f1.neg()), union(&[((-1, 1), (1, 1))]));
        let zero = union(&[((0, 1), (0, 1))]);
        assert_eq!(zero.minkowski_sum(&f1), f1);
        assert!(IntervalUnion::empty().minkowski_sum(&f1).is_empty());
    }

    #[test]
    fn measure_and_gaps() {
        assert_eq!(union(&[((0, 1), (2, 1))]).measure(), q(2, 1));
        let f2 = union(&[
            ((0, 1), (1, 9)),
            ((2, 9), (1, 3)),
            ((2, 3), (7, 9)),
            ((8, 9), (1, 1)),
        ]);
        assert_eq!(f2.measure(), q(4, 9));
        assert_eq!(IntervalUnion::<Rational>::empty().measure(), q(0, 1));
        assert_eq!(
            third_level_one().gaps(),
            vec![Interval::new(q(1, 3), q(2, 3)).unwrap()]
        );
        assert!(third_level_one().meets_open(&q(0, 1), &q(1, 3)));
        assert!(!third_level_one().meets_open(&q(1, 3), &q(2, 3)));
    }

    #[test]
    fn json_round_trip() {
        let u = third_level_one();
        let text = serde_json::to_string(&u).unwrap();
        assert_eq!(text, r#"[["0/1","1/3"],["2/3","1/1"]]"#);
        assert_eq!(serde_json::from_str::<IntervalUnion<Rational>>(&text).unwrap(), u);
    }

    fn arb_interval() -> impl Strategy<Value = Interval<Rational>> {
        (-50i64..50, 0i64..20, 1i64..12).prop_map(|(a, w, d)| {
            Interval::new(q(a, d), q(a + w, d)).unwrap()
        })
    }

    proptest! {
        #[test]
        fn normalize_is_idempotent_and_order_insensitive(
            mut items in prop::collection::vec(arb_interval(), 0..24),
            seed in any::<u64>(),
        ) {
            let canonical = IntervalUnion::normalize(items.clone());
            prop_assert_eq!(IntervalUnion::normalize(canonical.parts().to_vec()), canonical.clone());
            // Deterministic shuffle.
            let mut s = seed | 1;
            for i in (1..items.len()).rev() {
                s ^= s << 13; s ^= s >> 7; s ^= s << 17;
                items.swap(i, (s % (i as u64 + 1)) as usize);
            }
            prop_assert_eq!(IntervalUnion::normalize(items.clone()), canonical.clone());
            for w in canonical.parts().windows(2) {
                prop_assert!(w[0].hi() < w[1].lo());
            }
            for item in &items {
                prop_assert!(canonical.contains(item));
            }
        }

        #[test]
        fn scaling_inverts(items in prop::collection::vec(arb_interval(), 0..12),
                           n in -9i64..9, d in 1i64..9) {
            prop_assume!(n != 0);
            let u = IntervalUnion::normalize(items);
            let t = q(n, d);
            let back = u.scale(&t).scale(&(q(1, 1) / t));
            prop_assert_eq!(back, u);
        }

        #[test]
        fn minkowski_of_single_intervals_adds_endpoints(a in arb_interval(), b in arb_interval()) {
            let sum = IntervalUnion::single(a.clone()).minkowski_sum(&IntervalUnion::single(b.clone()));
            prop_assert_eq!(sum, IntervalUnion::single(a.add(&b)));
        }

        #[test]
        fn linear_union_matches_renormalization(
            xs in prop::collection::vec(arb_interval(), 0..12),
            ys in prop::collection::vec(arb_interval(), 0..12),
        ) {
            let a = IntervalUnion::normalize(xs.clone());
            let b = IntervalUnion::normalize(ys.clone());
            let all: Vec<_> = xs.into_iter().chain(ys).collect();
            prop_assert_eq!(a.union(&b), IntervalUnion::normalize(all));
        }
    }
}
