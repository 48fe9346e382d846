//! Four-square decomposition: scaling into `((1 - r)^2, 4]`, a fourth
//! coordinate from a fixed candidate list, and a refinement chain for the
//! remaining three squares.

use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::cantor::{point_value, CantorParams, CantorPoint, Digit, Word};
use crate::certificate::{Certificate, CertificateTarget, SCHEMA_VERSION};
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::lemma::{base_boxes, poly_a, poly_b, refine_step, BaseFamily, ChildIndex, TripleBox};
use crate::scalar::Scalar;
use crate::{QParams, Rational};

/// First candidate bound tried by [`decompose_four`].
pub const INITIAL_SCAN: usize = 8;
/// Largest candidate bound [`decompose_four`] will try before giving up.
pub const SCAN_CAP: usize = 4096;

#[derive(Clone, Debug, PartialEq)]
pub struct KnownInterval<T> {
    pub scale: usize,
    pub base: BaseFamily,
    pub interval: Interval<T>,
}

/// `r^(2m) [a, b]` and `r^(2m) [2 (1 - r)^2, 3]` for `m = 0..=M`, in that
/// order for each `m`.
#[derive(Clone, Debug, PartialEq)]
pub struct KnownIntervalFamily<T> {
    pub entries: Vec<KnownInterval<T>>,
}

impl<T: Scalar> KnownIntervalFamily<T> {
    pub fn find(&self, t: &T) -> Option<&KnownInterval<T>> {
        self.entries.iter().find(|e| e.interval.contains(t))
    }
}

pub fn base_interval<T: Scalar>(params: &CantorParams<T>, base: BaseFamily) -> Interval<T> {
    match base {
        BaseFamily::Ab => {
            let r = params.ratio();
            Interval::ordered(poly_a(r), poly_b(r))
        }
        BaseFamily::Main => Interval::ordered(
            T::from_int(2) * params.one_minus_ratio().square(),
            T::from_int(3),
        ),
    }
}

fn scaled_target<T: Scalar>(params: &CantorParams<T>, base: BaseFamily, scale: usize) -> KnownInterval<T> {
    KnownInterval {
        scale,
        base,
        interval: base_interval(params, base).scale(&params.ratio_pow(2 * scale)),
    }
}

pub fn known_intervals<T: Scalar>(params: &CantorParams<T>, max_scale: usize) -> Result<KnownIntervalFamily<T>> {
    params.require_thick("known intervals")?;
    let entries = (0..=max_scale)
        .flat_map(|m| [BaseFamily::Ab, BaseFamily::Main].map(|b| scaled_target(params, b, m)))
        .collect();
    Ok(KnownIntervalFamily { entries })
}

/// Smallest `s` with `y = x / r^(2s)` in `((1 - r)^2, 4]`.
pub fn scaling_reduce<T: Scalar>(params: &CantorParams<T>, x: &T) -> Result<(usize, T)> {
    params.require_thick("scaling reduction")?;
    if !x.is_positive() || *x > T::from_int(4) {
        return Err(Error::OutOfRange {
            value: x.to_string(),
            range: "(0, 4]".into(),
        });
    }
    let floor = params.one_minus_ratio().square();
    let r2 = params.ratio().square();
    let mut y = x.clone();
    let mut s = 0;
    while y <= floor {
        y = y / r2.clone();
        s += 1;
    }
    Ok((s, y))
}

/// The fourth coordinate, by the shape of its address.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FourthChoice {
    /// `1`.
    One,
    /// `0`.
    Zero,
    /// `1 - r`.
    Shifted { n: usize },
    /// `1 - r + r^(2n)`.
    Raised { n: usize },
    /// `1 - r + r^(2n-1) - r^(2n)`.
    Dipped { n: usize },
}

impl FourthChoice {
    pub fn point(self) -> CantorPoint {
        let two = Word::repeat(Digit::Two, 1);
        match self {
            FourthChoice::One => CantorPoint::one(),
            FourthChoice::Zero => CantorPoint::zero(),
            FourthChoice::Shifted { .. } => CantorPoint::left(two),
            FourthChoice::Raised { n } => CantorPoint::right(two.concat(&Word::repeat(Digit::One, 2 * n - 1))),
            FourthChoice::Dipped { n } => CantorPoint::left(
                two.concat(&Word::repeat(Digit::One, 2 * n - 2)).concat(&Word::repeat(Digit::Two, 1)),
            ),
        }
    }

    /// The `n` of the candidate family, if any.
    pub fn family_index(self) -> Option<usize> {
        match self {
            FourthChoice::One | FourthChoice::Zero => None,
            FourthChoice::Shifted { n } | FourthChoice::Raised { n } | FourthChoice::Dipped { n } => Some(n),
        }
    }
}

impl fmt::Display for FourthChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FourthChoice::One => f.write_str("x4=1"),
            FourthChoice::Zero => f.write_str("x4=0"),
            FourthChoice::Shifted { n } => write!(f, "x4=1-r n={n}"),
            FourthChoice::Raised { n } => write!(f, "x4=1-r+r^2n n={n}"),
            FourthChoice::Dipped { n } => write!(f, "x4=1-r+r^(2n-1)-r^2n n={n}"),
        }
    }
}

/// Human-readable case tag stored in certificates.
pub fn case_tag(fourth: FourthChoice, base: BaseFamily, scale: usize) -> String {
    format!("{fourth} -> {base} m={scale}")
}

pub const ZERO_CASE: &str = "zero input";

#[derive(Clone, Debug, PartialEq)]
pub struct FourthSelection<T> {
    pub fourth: FourthChoice,
    pub point: CantorPoint,
    pub target: KnownInterval<T>,
    /// `y - x4^2`.
    pub remainder: T,
    pub case: String,
}

/// Scans `x4 = 1` and `x4 = 0` against MAIN at scale 0, then for
/// `n = 1..=max_n` the three values `1 - r`, `1 - r + r^(2n)`,
/// `1 - r + r^(2n-1) - r^(2n)`, each against AB at scale `n - 1` and MAIN at
/// scale `n`. Returns the first hit.
pub fn choose_fourth<T: Scalar>(params: &CantorParams<T>, y: &T, max_n: usize) -> Result<FourthSelection<T>> {
    params.require_thick("fourth coordinate selection")?;
    let floor = params.one_minus_ratio().square();
    if *y <= floor || *y > T::from_int(4) {
        return Err(Error::OutOfRange {
            value: y.to_string(),
            range: format!("({floor}, 4]"),
        });
    }
    let attempt = |fourth: FourthChoice, target: KnownInterval<T>| {
        let point = fourth.point();
        let remainder = y.clone() - point_value(params, &point).square();
        target.interval.contains(&remainder).then(|| FourthSelection {
            fourth,
            case: case_tag(fourth, target.base, target.scale),
            point,
            target,
            remainder,
        })
    };
    for fourth in [FourthChoice::One, FourthChoice::Zero] {
        if let Some(hit) = attempt(fourth, scaled_target(params, BaseFamily::Main, 0)) {
            return Ok(hit);
        }
    }
    for n in 1..=max_n {
        let targets = [
            scaled_target(params, BaseFamily::Ab, n - 1),
            scaled_target(params, BaseFamily::Main, n),
        ];
        for fourth in [
            FourthChoice::Shifted { n },
            FourthChoice::Raised { n },
            FourthChoice::Dipped { n },
        ] {
            for target in &targets {
                if let Some(hit) = attempt(fourth, target.clone()) {
                    return Ok(hit);
                }
            }
        }
    }
    Err(Error::NoCandidate {
        scanned: max_n,
        diagnostics: format!("y = {y}, y - (1-r)^2 = {}", y.clone() - floor),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ThreeSquares<T> {
    pub points: [CantorPoint; 3],
    /// Position of the starting box in [`base_boxes`].
    pub base_index: usize,
    pub trace: Vec<ChildIndex>,
    pub final_box: TripleBox<T>,
    /// Width of the final box image.
    pub bound: T,
}

/// Starts from the first base box of `base` whose image contains `t`, takes
/// `depth` refinement steps, and reads the three points off the final box.
///
/// Points are left endpoints, except when `t` is the top of the final image,
/// where right endpoints hit `t` exactly.
pub fn decompose_three<T: Scalar>(
    params: &CantorParams<T>,
    t: &T,
    base: BaseFamily,
    depth: usize,
) -> Result<ThreeSquares<T>> {
    let boxes = base_boxes(params)?;
    let (base_index, start) = boxes
        .iter()
        .enumerate()
        .find(|(_, b)| b.family == base && b.image.contains(t))
        .ok_or_else(|| Error::OutOfRange {
            value: t.to_string(),
            range: base_interval(params, base).to_string(),
        })?;
    let mut current = start.triple.clone();
    let mut trace = Vec::with_capacity(depth);
    for _ in 0..depth {
        let idx = refine_step(params, &current, t)?;
        current = current.child(params, idx);
        trace.push(idx);
    }
    let image = current.image(params);
    let words = current.words(params)?;
    let at_top = image.hi() == t;
    let points = words.map(|w| {
        if at_top {
            CantorPoint::right(w)
        } else {
            CantorPoint::left(w)
        }
    });
    Ok(ThreeSquares {
        points,
        base_index,
        trace,
        final_box: current,
        bound: image.width(),
    })
}

/// A checked certificate for `x` in `[0, 4]` with a refinement chain of
/// length `depth`.
pub fn decompose_four(params: &QParams, x: &Rational, depth: usize) -> Result<Certificate> {
    params.require_thick("decomposition cover")?;
    let zero = Rational::from_int(0);
    if *x < zero || *x > Rational::from_int(4) {
        return Err(Error::OutOfRange {
            value: x.to_string(),
            range: "[0, 4]".into(),
        });
    }
    if x.is_zero() {
        let points = vec![CantorPoint::zero(); 4];
        return Ok(Certificate {
            schema_version: SCHEMA_VERSION,
            alpha: params.alpha().clone(),
            x: x.clone(),
            values: vec![zero.clone(); 4],
            points,
            residual: zero.clone(),
            bound: zero,
            depth,
            scaling: 0,
            case: ZERO_CASE.into(),
            fourth: FourthChoice::Zero,
            target: None,
            trace: Vec::new(),
        });
    }
    let (s, y) = scaling_reduce(params, x)?;
    let mut max_n = INITIAL_SCAN;
    let selection = loop {
        match choose_fourth(params, &y, max_n) {
            Ok(sel) => break sel,
            Err(Error::NoCandidate { .. }) if max_n < SCAN_CAP => max_n = (2 * max_n).min(SCAN_CAP),
            Err(e) => return Err(e),
        }
    };
    let m = selection.target.scale;
    let t = selection.remainder.clone() / params.ratio_pow(2 * m);
    let three = decompose_three(params, &t, selection.target.base, depth)?;

    let outer = Word::repeat(Digit::One, s + m);
    let mut points: Vec<CantorPoint> = three.points.iter().map(|p| p.prefixed(&outer)).collect();
    points.push(selection.point.prefixed(&Word::repeat(Digit::One, s)));
    let values: Vec<Rational> = points.iter().map(|p| point_value(params, p)).collect();
    let residual = values.iter().fold(x.clone(), |acc, v| acc - v.square());
    let bound = three.bound * params.ratio_pow(2 * (s + m));
    if residual.is_negative() || residual > bound {
        return Err(Error::Inconsistency(format!(
            "residual {residual} outside [0, {bound}] for x = {x}"
        )));
    }
    Ok(Certificate {
        schema_version: SCHEMA_VERSION,
        alpha: params.alpha().clone(),
        x: x.clone(),
        points,
        values,
        residual,
        bound,
        depth,
        scaling: s,
        case: selection.case,
        fourth: selection.fourth,
        target: Some(CertificateTarget {
            base: selection.target.base,
            scale: m,
            base_box: three.base_index,
        }),
        trace: three.trace,
    })
}
