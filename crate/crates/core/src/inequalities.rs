//! Exact evaluation of the polynomial inequalities the construction rests on.
//!
//! Every [`Check`] computes its quantity directly (as a difference of interval
//! endpoints or of the two sides of a condition), compares it with each of its
//! simplified closed forms, walks its chain of lower or upper bounds, and
//! confirms the asserted sign.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cantor::{level_left_endpoints, word_left_endpoint, CantorParams, Digit, Word, DEFAULT_LEVEL_CAP};
use crate::error::Result;
use crate::lemma::{base_boxes, cond_overlap, overlap_margins, poly_a, poly_b, TripleBox};
use crate::rational::to_pq;
use crate::scalar::Scalar;
use crate::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Sign {
    #[serde(rename = ">0")]
    Positive,
    #[serde(rename = ">=0")]
    NonNegative,
    #[serde(rename = "<0")]
    Negative,
}

impl Sign {
    pub fn holds<T: Scalar>(self, value: &T) -> bool {
        match self {
            Sign::Positive => value.is_positive(),
            Sign::NonNegative => !value.is_negative(),
            Sign::Negative => value.is_negative(),
        }
    }
}

/// Relation between consecutive links of a bounding chain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Link {
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "<")]
    Lt,
}

impl Link {
    fn holds<T: Scalar>(self, left: &T, right: &T) -> bool {
        match self {
            Link::Ge => left >= right,
            Link::Gt => left > right,
            Link::Le => left <= right,
            Link::Lt => left < right,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check<T> {
    pub group: &'static str,
    pub name: String,
    pub level: Option<usize>,
    pub value: T,
    pub closed_forms: Vec<T>,
    pub chain: Vec<(Link, T)>,
    /// Asserted for `value`.
    pub sign: Sign,
    /// Asserted for the last link of the chain, when there is one.
    pub tail_sign: Option<Sign>,
}

impl<T: Scalar> Check<T> {
    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (i, form) in self.closed_forms.iter().enumerate() {
            if *form != self.value {
                out.push(format!("closed form {i} = {form} differs from {}", self.value));
            }
        }
        let mut prev = &self.value;
        for (i, (link, bound)) in self.chain.iter().enumerate() {
            if !link.holds(prev, bound) {
                out.push(format!("chain link {i}: {prev} {link:?} {bound} fails"));
            }
            prev = bound;
        }
        if !self.sign.holds(&self.value) {
            out.push(format!("value {} is not {:?}", self.value, self.sign));
        }
        if let (Some(sign), Some((_, last))) = (self.tail_sign, self.chain.last()) {
            if !sign.holds(last) {
                out.push(format!("last bound {last} is not {sign:?}"));
            }
        }
        out
    }

    pub fn holds(&self) -> bool {
        self.failures().is_empty()
    }
}

impl Serialize for Check<Rational> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = s.serialize_map(Some(6))?;
        m.serialize_entry("group", self.group)?;
        m.serialize_entry("name", &self.name)?;
        m.serialize_entry("level", &self.level)?;
        m.serialize_entry("value", &to_pq(&self.value))?;
        m.serialize_entry("sign", &self.sign)?;
        m.serialize_entry("holds", &self.holds())?;
        m.end()
    }
}

fn c<T: Scalar>(k: i64) -> T {
    T::from_int(k)
}

/// Checks for the six consecutive-child differences and the join of the
/// overlap argument, on one box that satisfies the overlap condition.
pub fn overlap_checks<T: Scalar>(params: &CantorParams<T>, b: &TripleBox<T>) -> Result<Vec<Check<T>>> {
    let margins = overlap_margins(params, b)?;
    let r = params.ratio().clone();
    let n = b.level();
    let rn = params.ratio_pow(n);
    let r2n = rn.square();
    let mut sorted = b.coords().clone();
    sorted.sort_by(|x, y| y.partial_cmp(x).expect("ordered"));
    let [u, v, w] = sorted;
    let two = c::<T>(2);
    let four_r_1 = c::<T>(4) * r.clone() - c(1);
    let three_r_1 = c::<T>(3) * r.clone() - c(1);

    let w_term = |k: T| two.clone() * k * w.clone() * rn.clone();
    let v_term = |k: T| two.clone() * k * v.clone() * rn.clone();
    let chains: Vec<Vec<(Link, T)>> = vec![
        vec![(Link::Ge, w_term(four_r_1.clone()) + four_r_1.clone() * r2n.clone())],
        vec![(Link::Ge, v_term(three_r_1.clone()) + (c::<T>(4) - r.clone()) * r2n.clone() * r.clone())],
        vec![(
            Link::Ge,
            w_term(four_r_1.clone())
                + (c::<T>(6) * r.clone() - two.clone() * r.square() - c(1)) * r2n.clone(),
        )],
        vec![
            (
                Link::Ge,
                w_term(three_r_1.clone())
                    + two.clone() * u.clone() * rn.clone() * r.clone()
                    + (two.clone() * r.clone() - c(1)) * r2n.clone(),
            ),
            (Link::Gt, w_term(three_r_1.clone()) + four_r_1.clone() * r2n.clone()),
        ],
        vec![(Link::Ge, v_term(three_r_1) + (r.clone() + two.clone()) * r2n.clone() * r.clone())],
        vec![(Link::Ge, w_term(four_r_1.clone()) + four_r_1 * r2n)],
        vec![],
    ];
    Ok(margins
        .into_iter()
        .zip(chains)
        .map(|(m, chain)| {
            let strict = m.strict;
            Check {
                group: "overlap",
                name: format!("{} at {}", m.name, b),
                level: Some(n),
                value: m.difference,
                closed_forms: vec![m.simplified],
                tail_sign: if chain.is_empty() { None } else { Some(Sign::Positive) },
                chain,
                sign: if strict { Sign::Positive } else { Sign::NonNegative },
            }
        })
        .collect())
}

/// The invariance condition evaluated on the three base boxes:
/// `2 (1 - r) max + (1 - 2r) r^n - (u + v + w) < 0` with closed forms
/// `-r`, `-1`, and `-2r^3 + 5r^2 - 5r + 1 = -r (2r - 1)(r - 2) - (3r - 1)`.
pub fn base_box_checks<T: Scalar>(params: &CantorParams<T>) -> Result<Vec<Check<T>>> {
    let r = params.ratio().clone();
    let boxes = base_boxes(params)?;
    let forms: [Vec<T>; 3] = [
        vec![-r.clone()],
        vec![c(-1)],
        vec![
            c::<T>(-2) * r.powu(3) + c::<T>(5) * r.square() - c::<T>(5) * r.clone() + c(1),
            -(r.clone() * (c::<T>(2) * r.clone() - c(1)) * (r.clone() - c(2)))
                - (c::<T>(3) * r.clone() - c(1)),
        ],
    ];
    Ok(boxes
        .iter()
        .zip(forms)
        .enumerate()
        .map(|(i, (b, closed_forms))| {
            let t = &b.triple;
            let value = c::<T>(2) * (c::<T>(1) - r.clone()) * t.max()
                + (c::<T>(1) - c::<T>(2) * r.clone()) * params.ratio_pow(t.level())
                - t.sum();
            Check {
                group: "base",
                name: format!("invariance slack of base box {i} {}", t),
                level: Some(t.level()),
                value,
                closed_forms,
                chain: vec![],
                sign: Sign::Negative,
                tail_sign: None,
            }
        })
        .collect())
}

/// The inequalities behind covering `((1-r)^2, 3 (1-r)^2]` with shifted
/// three-square intervals, for one `n >= 1`.
pub fn cover_checks<T: Scalar>(params: &CantorParams<T>, n: usize) -> Vec<Check<T>> {
    assert!(n >= 1);
    let r = params.ratio().clone();
    let s = params.one_minus_ratio();
    let s2 = s.square();
    let a = poly_a(&r);
    let b = poly_b(&r);
    let r2n = params.ratio_pow(2 * n);
    let r2n_1 = params.ratio_pow(2 * n - 1);
    let r2n_2 = params.ratio_pow(2 * n - 2);
    let r4n = r2n.square();
    let two = c::<T>(2);
    let x_raised = s.clone() + r2n.clone();
    let x_dipped = s.clone() + r2n_1.clone() - r2n.clone();
    let b_plus = b.clone() + two.clone() * r.square() - two.clone() * r.powu(3);
    let mut out = Vec::new();

    out.push(Check {
        group: "cover",
        name: "AB pieces overlap: b r^(2n-2) + (1-r)^2 - (a r^(2n-2) + (1-r+r^(2n))^2)".into(),
        level: Some(n),
        value: b.clone() * r2n_2.clone() + s2.clone() - (a.clone() * r2n_2.clone() + x_raised.square()),
        closed_forms: vec![
            (b.clone() - a.clone()) * r2n_2.clone() - two.clone() * s.clone() * r2n.clone() - r4n.clone(),
            (c::<T>(4) * r.clone() - r.square() - r2n.clone()) * r2n.clone(),
        ],
        chain: vec![(Link::Ge, (c::<T>(4) * r.clone() - two.clone() * r.square()) * r2n.clone())],
        sign: Sign::Positive,
        tail_sign: Some(Sign::Positive),
    });
    out.push(Check {
        group: "cover",
        name: "AB upper end: b r^(2n-2) + (1-r+r^(2n))^2 - ((1-r)^2 + (b+2r^2-2r^3) r^(2n-2))".into(),
        level: Some(n),
        value: b.clone() * r2n_2.clone() + x_raised.square() - (s2.clone() + b_plus.clone() * r2n_2.clone()),
        closed_forms: vec![r4n.clone()],
        chain: vec![],
        sign: Sign::Positive,
        tail_sign: None,
    });
    out.push(Check {
        group: "cover",
        name: "MAIN pieces 1-2: 3r^(2n) + (1-r)^2 - (2(1-r)^2 r^(2n) + (1-r+r^(2n))^2)".into(),
        level: Some(n),
        value: c::<T>(3) * r2n.clone() + s2.clone() - (two.clone() * s2.clone() * r2n.clone() + x_raised.square()),
        closed_forms: vec![(c::<T>(6) * r.clone() - two.clone() * r.square() - c(1) - r2n.clone()) * r2n.clone()],
        chain: vec![
            (Link::Ge, (c::<T>(6) * r.clone() - c::<T>(3) * r.square() - c(1)) * r2n.clone()),
            (Link::Ge, (c::<T>(3) * s.clone() * r.clone() + c::<T>(3) * r.clone() - c(1)) * r2n.clone()),
        ],
        sign: Sign::Positive,
        tail_sign: Some(Sign::Positive),
    });
    let q = r2n_1.clone();
    let three_r_1 = c::<T>(3) * r.clone() - c(1);
    out.push(Check {
        group: "cover",
        name: "MAIN pieces 2-3: 3r^(2n) + (1-r+r^(2n))^2 - (2(1-r)^2 r^(2n) + (1-r+r^(2n-1)-r^(2n))^2)".into(),
        level: Some(n),
        value: c::<T>(3) * r2n.clone() + x_raised.square()
            - (two.clone() * s2.clone() * r2n.clone() + x_dipped.square()),
        closed_forms: vec![
            c::<T>(-2) * q.clone() + c::<T>(7) * r2n.clone() - two.clone() * params.ratio_pow(2 * n + 2)
                - params.ratio_pow(4 * n - 2)
                + two.clone() * params.ratio_pow(4 * n - 1),
            two.clone() * three_r_1.clone() * q.clone()
                + (c::<T>(1) - two.clone() * r.square()) * r2n.clone()
                - params.ratio_pow(4 * n - 2)
                + two.clone() * params.ratio_pow(4 * n - 1),
        ],
        chain: vec![
            (
                Link::Gt,
                two.clone() * three_r_1.clone() * q.clone() + params.ratio_pow(2 * n + 1)
                    - params.ratio_pow(4 * n - 2)
                    + two.clone() * params.ratio_pow(4 * n - 1),
            ),
            (
                Link::Ge,
                two.clone() * three_r_1.clone() * q.clone() - params.ratio_pow(4 * n - 2)
                    + c::<T>(3) * params.ratio_pow(4 * n - 1),
            ),
            (
                Link::Ge,
                two.clone() * three_r_1.clone() * q.clone() + three_r_1 * params.ratio_pow(4 * n - 2),
            ),
        ],
        sign: Sign::Positive,
        tail_sign: Some(Sign::NonNegative),
    });
    out.push(Check {
        group: "cover",
        name: "MAIN upper end: 3r^(2n) + (1-r+r^(2n-1)-r^(2n))^2 - ((1-r)^2 + (2-r+2r^2) r^(2n-1))".into(),
        level: Some(n),
        value: c::<T>(3) * r2n.clone() + x_dipped.square()
            - (s2.clone() + (two.clone() - r.clone() + two.clone() * r.square()) * q.clone()),
        closed_forms: vec![(q.clone() - r2n.clone()).square()],
        chain: vec![],
        sign: Sign::Positive,
        tail_sign: None,
    });
    out
}

/// The two polynomial sign facts that stitch the pieces for consecutive `n`
/// together (no dependence on `n`).
pub fn stitch_checks<T: Scalar>(params: &CantorParams<T>) -> Vec<Check<T>> {
    let r = params.ratio().clone();
    let a = poly_a(&r);
    let b = poly_b(&r);
    let two = c::<T>(2);
    let s = params.one_minus_ratio();
    vec![
        Check {
            group: "cover",
            name: "a - (2 - r + 2r^2) r < 0".into(),
            level: None,
            value: a - (two.clone() - r.clone() + two.clone() * r.square()) * r.clone(),
            closed_forms: vec![
                two.clone() * r.powu(4) - c::<T>(6) * r.powu(3) + c::<T>(4) * r.square() - c::<T>(4) * r.clone() + c(1),
                (two.clone() * r.clone() - c(1)) * r.powu(3)
                    - (c::<T>(5) * r.square() - c::<T>(4) * r.clone() + c(1)) * r.clone()
                    - (c::<T>(3) * r.clone() - c(1)),
            ],
            chain: vec![],
            sign: Sign::Negative,
            tail_sign: None,
        },
        Check {
            group: "cover",
            name: "(b + 2r^2 - 2r^3) - 2(1-r)^2 > 0".into(),
            level: None,
            value: b + two.clone() * r.square() - two.clone() * r.powu(3) - two.clone() * s.square(),
            closed_forms: vec![
                r.powu(4) - c::<T>(4) * r.powu(3) + c::<T>(5) * r.square() + two.clone() * r.clone() - c(1),
                r.powu(4)
                    + two.clone() * r.square() * (c::<T>(1) - two * r.clone())
                    + (c::<T>(3) * r.clone() - c(1)) * (r + c(1)),
            ],
            chain: vec![],
            sign: Sign::Positive,
            tail_sign: None,
        },
    ]
}

/// Draws a random left endpoint of `L_n` with `n` in `1..=max_level`.
pub(crate) fn random_endpoint<T: Scalar>(
    params: &CantorParams<T>,
    rng: &mut ChaCha8Rng,
    level: usize,
) -> T {
    let word = Word::new(
        (0..level)
            .map(|_| if rng.gen_bool(0.5) { Digit::Two } else { Digit::One })
            .collect(),
    );
    word_left_endpoint(params, &word)
}

/// Random boxes at `level` that satisfy the overlap condition.
pub(crate) fn random_overlap_boxes<T: Scalar>(
    params: &CantorParams<T>,
    rng: &mut ChaCha8Rng,
    level: usize,
    count: usize,
) -> Result<Vec<TripleBox<T>>> {
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0;
    while out.len() < count && attempts < count * 50 {
        attempts += 1;
        let coords = [(); 3].map(|_| random_endpoint(params, rng, level));
        let b = TripleBox::new(params, coords, level)?;
        if cond_overlap(params, &b)? {
            out.push(b);
        }
    }
    Ok(out)
}

/// All sorted triples `u >= v >= w` over `L_n`.
pub fn sorted_triples<T: Scalar>(params: &CantorParams<T>, level: usize) -> Result<Vec<TripleBox<T>>> {
    let l = level_left_endpoints(params, level, DEFAULT_LEVEL_CAP)?;
    let mut out = Vec::new();
    for i in 0..l.len() {
        for j in 0..=i {
            for k in 0..=j {
                out.push(TripleBox::trusted([l[i].clone(), l[j].clone(), l[k].clone()], level));
            }
        }
    }
    Ok(out)
}

/// Every check at one ratio: overlap differences on all overlap-condition
/// boxes with `n <= exhaustive_level` plus `samples` random boxes at each
/// deeper level up to `max_level`, the base-box inequalities, and the cover
/// inequalities for `n = 1..=max_level`.
pub fn full_audit<T: Scalar>(
    params: &CantorParams<T>,
    exhaustive_level: usize,
    max_level: usize,
    samples: usize,
    seed: u64,
) -> Result<Vec<Check<T>>> {
    let mut checks = Vec::new();
    for level in 1..=exhaustive_level.min(max_level) {
        for b in sorted_triples(params, level)? {
            if cond_overlap(params, &b)? {
                checks.extend(overlap_checks(params, &b)?);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for level in exhaustive_level + 1..=max_level {
        for b in random_overlap_boxes(params, &mut rng, level, samples)? {
            checks.extend(overlap_checks(params, &b)?);
        }
    }
    checks.extend(base_box_checks(params)?);
    for n in 1..=max_level {
        checks.extend(cover_checks(params, n));
    }
    checks.extend(stitch_checks(params));
    Ok(checks)
}
