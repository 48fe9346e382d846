//! Decomposition certificates and their verifier.
//!
//! The verifier rebuilds everything from the stored words and indices using
//! only point evaluation and box images. It never calls the lemma engine or
//! the decomposer, so a bug there cannot vouch for itself.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::cantor::{point_value, word_left_endpoint, CantorPoint, Digit, Tail};
use crate::decompose::{case_tag, FourthChoice, ZERO_CASE};
use crate::error::{Error, Result};
use crate::interval::{box_sum_of_squares_image, Interval};
use crate::lemma::{BaseFamily, ChildIndex};
use crate::rational::serde_pq;
use crate::scalar::Scalar;
use crate::{QParams, Rational};

pub const SCHEMA_VERSION: u32 = 1;

/// Which scaled base interval the three squares land in, and which base box
/// the refinement chain starts from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateTarget {
    pub base: BaseFamily,
    pub scale: usize,
    pub base_box: usize,
}

/// `x = x1^2 + x2^2 + x3^2 + x4^2 + residual` with `0 <= residual <= bound`.
/// The first three points come from the refinement chain, the fourth is the
/// chosen fourth coordinate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub schema_version: u32,
    #[serde(with = "serde_pq")]
    pub alpha: Rational,
    #[serde(with = "serde_pq")]
    pub x: Rational,
    pub points: Vec<CantorPoint>,
    #[serde(with = "serde_pq::vec")]
    pub values: Vec<Rational>,
    #[serde(with = "serde_pq")]
    pub residual: Rational,
    #[serde(with = "serde_pq")]
    pub bound: Rational,
    pub depth: usize,
    pub scaling: usize,
    pub case: String,
    pub fourth: FourthChoice,
    pub target: Option<CertificateTarget>,
    pub trace: Vec<ChildIndex>,
}

impl Certificate {
    /// Pretty JSON with a trailing newline; stable byte-for-byte.
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("certificate serializes");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("certificate: {e}")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub valid: bool,
    pub reasons: Vec<String>,
}

/// Recomputes values, residual, bound, scaling, the fourth coordinate and the
/// refinement chain from scratch.
pub fn verify_certificate(params: &QParams, cert: &Certificate) -> Verdict {
    let mut reasons = Vec::new();
    check(params, cert, &mut reasons);
    Verdict {
        valid: reasons.is_empty(),
        reasons,
    }
}

fn q(k: i64) -> Rational {
    Rational::from_int(k)
}

fn check(params: &QParams, cert: &Certificate, reasons: &mut Vec<String>) {
    let mut fail = |msg: String| reasons.push(msg);
    if cert.schema_version != SCHEMA_VERSION {
        fail(format!("schema version {} is not {SCHEMA_VERSION}", cert.schema_version));
    }
    if cert.alpha != *params.alpha() {
        fail(format!("alpha {} does not match {}", cert.alpha, params.alpha()));
    }
    if params.alpha() < &q(3) {
        fail("alpha below 3: no decomposition cover".into());
        return;
    }
    if cert.points.len() != 4 || cert.values.len() != 4 {
        fail(format!(
            "expected 4 points and 4 values, got {} and {}",
            cert.points.len(),
            cert.values.len()
        ));
        return;
    }
    if cert.x.is_negative() || cert.x > q(4) {
        fail(format!("x = {} outside [0, 4]", cert.x));
        return;
    }

    for (i, (p, v)) in cert.points.iter().zip(&cert.values).enumerate() {
        let actual = point_value(params, p);
        if actual != *v {
            fail(format!("value {i} is {v} but the point evaluates to {actual}"));
        }
    }
    let residual = cert
        .points
        .iter()
        .fold(cert.x.clone(), |acc, p| acc - point_value(params, p).square());
    if residual != cert.residual {
        fail(format!("residual {} should be {residual}", cert.residual));
    }
    if residual.is_negative() {
        fail(format!("residual {residual} is negative"));
    }
    if residual > cert.bound {
        fail(format!("residual {residual} exceeds bound {}", cert.bound));
    }

    if cert.x.is_zero() {
        if cert.case != ZERO_CASE || cert.target.is_some() || !cert.trace.is_empty() || !cert.bound.is_zero() {
            fail("zero input must carry the zero case, no target, no trace and bound 0".into());
        }
        return;
    }

    // Scaling: y = x / r^(2s) in ((1-r)^2, 4] with s minimal.
    let r = params.ratio().clone();
    let floor = (q(1) - r.clone()).square();
    let r2 = r.square();
    let y = cert.x.clone() / r2.pow(cert.scaling as i32);
    if y <= floor || y > q(4) {
        fail(format!("x / r^(2s) = {y} outside (({floor}), 4] for s = {}", cert.scaling));
    }
    if cert.scaling > 0 && cert.x.clone() / r2.pow(cert.scaling as i32 - 1) > floor {
        fail(format!("scaling {} is not minimal", cert.scaling));
    }

    let Some(target) = cert.target else {
        fail("nonzero input without a target".into());
        return;
    };
    if cert.case != case_tag(cert.fourth, target.base, target.scale) {
        fail(format!("case tag {:?} does not describe the fourth choice and target", cert.case));
    }
    let fourth_value = match expected_fourth(&r, cert.fourth, target) {
        Ok(v) => v,
        Err(msg) => {
            fail(msg);
            return;
        }
    };
    let s = cert.scaling;
    let m = target.scale;
    let x4 = &cert.points[3];
    if !has_ones_prefix(x4, s) {
        fail(format!("fourth point {x4} does not start with {s} ones"));
    }
    if point_value(params, x4) != fourth_value.clone() * r.pow(s as i32) {
        fail(format!("fourth point does not evaluate to r^s * {fourth_value}"));
    }

    let t = (y - fourth_value.square()) / r2.pow(m as i32);
    let Some((start, start_level)) = base_box(&r, target) else {
        fail(format!("base box {} does not belong to {}", target.base_box, target.base));
        return;
    };
    let base = image(&r, &start, start_level);
    let expected_base = match target.base {
        BaseFamily::Main => Interval::new(q(2) * floor.clone(), q(3)).expect("ordered"),
        BaseFamily::Ab => {
            let (ab, _) = base_box(&r, CertificateTarget { base_box: 2, ..target }).expect("AB box");
            image(&r, &ab, 2)
        }
    };
    if !expected_base.contains(&t) {
        fail(format!("remainder {t} outside the {} interval {expected_base}", target.base));
    }
    if !base.contains(&t) {
        fail(format!("remainder {t} outside the image {base} of the starting box"));
        return;
    }
    if target.base == BaseFamily::Main && target.base_box == 1 {
        let (first, _) = base_box(&r, CertificateTarget { base_box: 0, ..target }).expect("MAIN box 0");
        if image(&r, &first, 1).contains(&t) {
            fail("the first MAIN base box already contains the remainder".into());
        }
    }

    if cert.trace.len() != cert.depth {
        fail(format!("trace has {} steps, depth is {}", cert.trace.len(), cert.depth));
    }
    let mut coords = start;
    let mut level = start_level;
    for (k, recorded) in cert.trace.iter().enumerate() {
        let step = (q(1) - r.clone()) * r.pow(level as i32);
        let chosen = ChildIndex::ALL.iter().copied().find(|idx| {
            let child = shifted(&coords, *idx, &step);
            image(&r, &child, level + 1).contains(&t)
        });
        match chosen {
            Some(idx) if idx == *recorded => {
                coords = shifted(&coords, idx, &step);
                level += 1;
            }
            Some(idx) => {
                fail(format!("step {k}: recorded child {recorded}, first containing child is {idx}"));
                return;
            }
            None => {
                fail(format!("step {k}: no child contains {t}"));
                return;
            }
        }
    }

    let last = image(&r, &coords, level);
    let tail = if *last.hi() == t { Tail::AllRight } else { Tail::AllLeft };
    let width = r.pow(level as i32);
    let outer = r.pow((s + m) as i32);
    for (i, c) in coords.iter().enumerate() {
        let p = &cert.points[i];
        if p.tail != tail {
            fail(format!("point {i} should have tail {tail:?}"));
        }
        if p.prefix.len() != s + m + level || !has_ones_prefix(p, s + m) {
            fail(format!("point {i} word {} is not {} ones then a level-{level} word", p.prefix, s + m));
        }
        let end = if tail == Tail::AllRight { c.clone() + width.clone() } else { c.clone() };
        if point_value(params, p) != end * outer.clone() {
            fail(format!("point {i} does not match the final box"));
        }
    }

    let sides: Vec<Interval<Rational>> = cert.points[..3]
        .iter()
        .map(|p| {
            let lo = word_left_endpoint(params, &p.prefix);
            let hi = lo.clone() + r.pow(p.prefix.len() as i32);
            Interval::new(lo, hi).expect("ordered")
        })
        .collect();
    match box_sum_of_squares_image(&sides) {
        Ok(img) if img.width() == cert.bound => {}
        Ok(img) => fail(format!("bound {} should be {}", cert.bound, img.width())),
        Err(e) => fail(format!("bound: {e}")),
    }
}

fn has_ones_prefix(p: &CantorPoint, count: usize) -> bool {
    p.prefix.len() >= count && p.prefix.digits()[..count].iter().all(|d| *d == Digit::One)
}

fn expected_fourth(r: &Rational, fourth: FourthChoice, target: CertificateTarget) -> std::result::Result<Rational, String> {
    let s = q(1) - r.clone();
    let ok_target = match (fourth, target.base) {
        (FourthChoice::One | FourthChoice::Zero, BaseFamily::Main) => target.scale == 0,
        (FourthChoice::Shifted { n } | FourthChoice::Raised { n }, BaseFamily::Ab) => n >= 1 && target.scale + 1 == n,
        (FourthChoice::Shifted { n } | FourthChoice::Raised { n } | FourthChoice::Dipped { n }, BaseFamily::Main) => {
            n >= 1 && target.scale == n
        }
        (FourthChoice::Dipped { n }, BaseFamily::Ab) => n >= 1 && target.scale + 1 == n,
        _ => false,
    };
    if !ok_target {
        return Err(format!("fourth choice {fourth} does not pair with {} m={}", target.base, target.scale));
    }
    Ok(match fourth {
        FourthChoice::One => q(1),
        FourthChoice::Zero => q(0),
        FourthChoice::Shifted { .. } => s,
        FourthChoice::Raised { n } => s + r.pow(2 * n as i32),
        FourthChoice::Dipped { n } => s + r.pow(2 * n as i32 - 1) - r.pow(2 * n as i32),
    })
}

/// `(coords, level)` of the requested base box.
fn base_box(r: &Rational, target: CertificateTarget) -> Option<([Rational; 3], usize)> {
    let s = q(1) - r.clone();
    let low = r.clone() - r.square();
    match (target.base, target.base_box) {
        (BaseFamily::Main, 0) => Some(([q(0), s.clone(), s], 1)),
        (BaseFamily::Main, 1) => Some(([s.clone(), s.clone(), s], 1)),
        (BaseFamily::Ab, 2) => Some(([low.clone(), low, s], 2)),
        _ => None,
    }
}

fn image(r: &Rational, coords: &[Rational; 3], level: usize) -> Interval<Rational> {
    let w = r.pow(level as i32);
    let sides: Vec<_> = coords
        .iter()
        .map(|c| Interval::new(c.clone(), c.clone() + w.clone()).expect("ordered"))
        .collect();
    box_sum_of_squares_image(&sides).expect("nonnegative sides")
}

fn shifted(coords: &[Rational; 3], idx: ChildIndex, step: &Rational) -> [Rational; 3] {
    let bits = idx.bits();
    [0, 1, 2].map(|i| {
        if bits[i] == 1 {
            coords[i].clone() + step.clone()
        } else {
            coords[i].clone()
        }
    })
}
