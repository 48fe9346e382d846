//! The image engine against brute-force oracles written from the definitions.

use cantor_squares::{box_sum_of_squares_image, CantorParams, ImageEngine, ImageMap, ImageRequest, Interval, Rational};
use num_rational::Ratio;
use proptest::prelude::*;

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// `L_n` from `L_0 = {0}`, `L_(k+1) = r L_k  ∪  (r L_k + 1 - r)`.
fn endpoints(r: &Rational, n: usize) -> Vec<Rational> {
    let mut level = vec![q(0, 1)];
    for _ in 0..n {
        let left: Vec<Rational> = level.iter().map(|x| x * r).collect();
        let right: Vec<Rational> = left.iter().map(|x| x + q(1, 1) - r).collect();
        level = left.into_iter().chain(right).collect();
    }
    level
}

fn merge(mut parts: Vec<(Rational, Rational)>) -> Vec<(Rational, Rational)> {
    parts.sort();
    let mut out: Vec<(Rational, Rational)> = Vec::new();
    for (lo, hi) in parts {
        match out.last_mut() {
            Some(last) if lo <= last.1 => {
                if hi > last.1 {
                    last.1 = hi;
                }
            }
            _ => out.push((lo, hi)),
        }
    }
    out
}

/// Every ordered `k`-tuple of level-`n` intervals, no symmetry reduction.
fn cartesian(alpha: &Rational, n: usize, k: usize, map: ImageMap) -> Vec<(Rational, Rational)> {
    let r = (q(1, 1) - q(1, 1) / alpha) / q(2, 1);
    let ends = endpoints(&r, n);
    let w = (0..n).fold(q(1, 1), |acc, _| acc * &r);
    let mut parts = Vec::new();
    let mut idx = vec![0usize; k];
    loop {
        let c: Vec<&Rational> = idx.iter().map(|&i| &ends[i]).collect();
        let part = match map {
            ImageMap::SumOfSquares => (
                c.iter().map(|x| *x * *x).sum(),
                c.iter().map(|x| (*x + &w) * (*x + &w)).sum(),
            ),
            ImageMap::Sum => {
                let lo: Rational = c.iter().copied().sum();
                let hi = &lo + &w * q(k as i64, 1);
                (lo, hi)
            }
            ImageMap::Difference => {
                let rest: Rational = c[1..].iter().copied().sum();
                let lo = c[0] - &rest - &w * q(k as i64 - 1, 1);
                let hi = c[0] + &w - &rest;
                (lo, hi)
            }
        };
        parts.push(part);
        let mut pos = 0;
        loop {
            if pos == k {
                return merge(parts);
            }
            idx[pos] += 1;
            if idx[pos] < ends.len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

fn engine_parts(alpha: &Rational, n: usize, k: usize, map: ImageMap) -> Vec<(Rational, Rational)> {
    let engine = ImageEngine::new(CantorParams::new(alpha.clone()).unwrap());
    let res = engine.image(&ImageRequest::new(n, k, map)).unwrap();
    res.union
        .parts()
        .iter()
        .map(|i| (i.lo().clone(), i.hi().clone()))
        .collect()
}

#[test]
fn multiset_enumeration_matches_cartesian_product() {
    for alpha in [q(3, 1), q(2, 1), q(5, 2), q(4, 1), q(10, 1)] {
        for map in [ImageMap::SumOfSquares, ImageMap::Sum, ImageMap::Difference] {
            for k in 1..=4 {
                let max_n = if k == 4 { 1 } else { 2 };
                for n in 1..=max_n {
                    assert_eq!(
                        engine_parts(&alpha, n, k, map),
                        cartesian(&alpha, n, k, map),
                        "alpha {alpha} map {map} n {n} k {k}"
                    );
                }
            }
        }
    }
}

#[test]
fn integer_lattice_path_matches_generic_rationals() {
    // BigRational requests run on the i128 lattice; Ratio<i64> has no lattice
    // and takes the generic enumeration.
    for (an, ad) in [(3, 1), (4, 1), (7, 2), (2, 1)] {
        let generic = ImageEngine::new(CantorParams::new(Ratio::<i64>::new(an, ad)).unwrap());
        let alpha = q(an, ad);
        for (n, k) in [(1, 2), (2, 2), (3, 2), (1, 3), (2, 3), (3, 3), (1, 4), (2, 4)] {
            for map in [ImageMap::SumOfSquares, ImageMap::Sum, ImageMap::Difference] {
                let g = generic.image(&ImageRequest::new(n, k, map)).unwrap();
                let g: Vec<(Rational, Rational)> = g
                    .union
                    .parts()
                    .iter()
                    .map(|i| {
                        let f = |x: &Ratio<i64>| q(*x.numer(), *x.denom());
                        (f(i.lo()), f(i.hi()))
                    })
                    .collect();
                assert_eq!(engine_parts(&alpha, n, k, map), g, "alpha {alpha} n {n} k {k} {map}");
            }
        }
    }
}

#[test]
fn images_are_nested_in_the_level() {
    let engine = ImageEngine::new(CantorParams::new(q(3, 1)).unwrap());
    let thin = ImageEngine::new(CantorParams::new(q(5, 2)).unwrap());
    for map in [ImageMap::SumOfSquares, ImageMap::Sum, ImageMap::Difference] {
        for n in 1..4 {
            assert!(engine.nestedness_check(n, 3, map).unwrap());
            assert!(thin.nestedness_check(n, 3, map).unwrap());
        }
    }
}

#[test]
fn extreme_points_survive_every_level() {
    for alpha in [q(3, 1), q(5, 2)] {
        let engine = ImageEngine::new(CantorParams::new(alpha).unwrap());
        for k in 1..=4usize {
            for n in 1..=3 {
                let u = engine.image(&ImageRequest::squares(n, k)).unwrap().union.clone();
                assert_eq!(u.min(), Some(&q(0, 1)));
                assert_eq!(u.max(), Some(&q(k as i64, 1)));
            }
        }
    }
}

fn box_strategy() -> impl Strategy<Value = Vec<(u32, u32)>> {
    prop::collection::vec((0u32..1000, 0u32..1000), 1..=4)
}

proptest! {
    #[test]
    fn box_image_contains_grid_samples_and_attains_corners(sides in box_strategy(), steps in 1u32..6) {
        let sides: Vec<Interval<Rational>> = sides
            .iter()
            .map(|&(a, b)| {
                let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
                Interval::new(q(lo as i64, 97), q(hi as i64, 97)).unwrap()
            })
            .collect();
        let image = box_sum_of_squares_image(&sides).unwrap();
        // Every grid point of the box maps inside the image.
        let k = sides.len();
        let mut idx = vec![0u32; k];
        'grid: loop {
            let value: Rational = sides
                .iter()
                .zip(&idx)
                .map(|(s, &i)| {
                    let x = s.lo() + (s.hi() - s.lo()) * q(i as i64, steps as i64);
                    &x * &x
                })
                .sum();
            prop_assert!(image.contains(&value));
            for slot in idx.iter_mut() {
                *slot += 1;
                if *slot <= steps {
                    continue 'grid;
                }
                *slot = 0;
            }
            break;
        }
        let low: Rational = sides.iter().map(|s| s.lo() * s.lo()).sum();
        let high: Rational = sides.iter().map(|s| s.hi() * s.hi()).sum();
        prop_assert_eq!(image.lo(), &low);
        prop_assert_eq!(image.hi(), &high);
    }
}
