//! Batch runs: the exhaustive lemma audit over small levels and seeded
//! decomposition sweeps.

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cantor::CantorParams;
use crate::certificate::{verify_certificate, Certificate};
use crate::decompose::decompose_four;
use crate::error::{Error, Result};
use crate::image::multiset_count;
use crate::inequalities::{overlap_checks, random_endpoint, sorted_triples};
use crate::lemma::{
    base_boxes, child_box_images, closed_form_child_image, cond_invariant, cond_overlap, verify_overlap_lemma,
    ChildIndex, TripleBox,
};
use crate::scalar::Scalar;
use crate::{QParams, Rational};

/// Failures kept verbatim in a report; the counts are always complete.
const KEPT_FAILURES: usize = 20;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct LevelTally {
    pub level: usize,
    pub triples: usize,
    pub overlap_boxes: usize,
    pub overlap_failures: usize,
    pub invariant_boxes: usize,
    pub invariant_failures: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LemmaAudit {
    pub alpha: String,
    pub max_level: usize,
    pub levels: Vec<LevelTally>,
    pub closed_form_samples: usize,
    pub closed_form_failures: usize,
    pub base_boxes: usize,
    pub failures: Vec<String>,
    pub pass: bool,
}

enum Finding {
    Overlap(String),
    Invariant(String),
}

fn audit_box<T: Scalar>(params: &CantorParams<T>, b: &TripleBox<T>) -> Result<(bool, bool, Vec<Finding>)> {
    let mut found = Vec::new();
    let overlap = cond_overlap(params, b)?;
    if overlap {
        if !verify_overlap_lemma(params, b)? {
            found.push(Finding::Overlap(format!("children of {b} do not cover its image")));
        }
        for check in overlap_checks(params, b)? {
            if !check.holds() {
                found.push(Finding::Overlap(format!("{}: {:?}", check.name, check.failures())));
            }
        }
    }
    let invariant = cond_invariant(params, b)?;
    if invariant {
        if !overlap {
            found.push(Finding::Invariant(format!("{b} is invariant but fails the overlap condition")));
        }
        for idx in ChildIndex::ALL {
            let child = b.child(params, idx);
            if !cond_invariant(params, &child)? {
                found.push(Finding::Invariant(format!("child {idx} of {b} loses invariance")));
            }
        }
    }
    Ok((overlap, invariant, found))
}

/// Every sorted triple over `L_n` for `n = 1..=max_level`: the overlap
/// closure and its margins wherever the overlap condition holds, and
/// propagation to all eight children wherever the invariance condition holds.
/// Then `samples` random unsorted boxes comparing the closed-form child images
/// with direct box images.
pub fn lemma_audit<T: Scalar>(
    params: &CantorParams<T>,
    max_level: usize,
    triple_cap: u128,
    samples: usize,
    seed: u64,
) -> Result<LemmaAudit> {
    params.require_thick("lemma audit")?;
    let mut failures = Vec::new();
    let mut levels = Vec::new();
    for level in 1..=max_level {
        let count = if level < 100 { multiset_count(1u128 << level, 3) } else { u128::MAX };
        if count > triple_cap {
            return Err(Error::CapExceeded {
                what: "lemma audit triples",
                requested: count.to_string(),
                cap: triple_cap.to_string(),
            });
        }
        let triples = sorted_triples(params, level)?;
        let results: Vec<(bool, bool, Vec<Finding>)> =
            triples.par_iter().map(|b| audit_box(params, b)).collect::<Result<_>>()?;
        let mut tally = LevelTally {
            level,
            triples: triples.len(),
            ..LevelTally::default()
        };
        for (overlap, invariant, found) in results {
            tally.overlap_boxes += overlap as usize;
            tally.invariant_boxes += invariant as usize;
            for f in found {
                let msg = match f {
                    Finding::Overlap(m) => {
                        tally.overlap_failures += 1;
                        m
                    }
                    Finding::Invariant(m) => {
                        tally.invariant_failures += 1;
                        m
                    }
                };
                if failures.len() < KEPT_FAILURES {
                    failures.push(msg);
                }
            }
        }
        levels.push(tally);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut closed_form_failures = 0;
    for _ in 0..samples {
        let level = rng.gen_range(1..=8);
        let coords = [(); 3].map(|_| random_endpoint(params, &mut rng, level));
        let b = TripleBox::trusted(coords, level);
        for (idx, direct) in child_box_images(params, &b) {
            if closed_form_child_image(params, &b, idx) != direct {
                closed_form_failures += 1;
                if failures.len() < KEPT_FAILURES {
                    failures.push(format!("closed form of child {idx} of {b} differs from {direct}"));
                }
            }
        }
    }

    let bases = base_boxes(params)?;
    let pass = failures.is_empty();
    Ok(LemmaAudit {
        alpha: params.alpha().to_string(),
        max_level,
        levels,
        closed_form_samples: samples,
        closed_form_failures,
        base_boxes: bases.len(),
        failures,
        pass,
    })
}

/// `count` rationals in `[0, 4]`: a denominator uniform in
/// `1..=max_denominator`, then a numerator uniform in `0..=4 q`.
pub fn random_inputs(seed: u64, count: usize, max_denominator: u64) -> Vec<Rational> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let q = rng.gen_range(1..=max_denominator);
            let p = rng.gen_range(0..=4 * q);
            Rational::new(BigInt::from(p), BigInt::from(q))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepEntry {
    pub certificate: Certificate,
    pub valid: bool,
    pub reasons: Vec<String>,
}

/// Decomposes and verifies every input, in parallel; output order follows
/// input order.
pub fn decomposition_sweep(params: &QParams, inputs: &[Rational], depth: usize) -> Result<Vec<SweepEntry>> {
    inputs
        .par_iter()
        .map(|x| {
            let certificate = decompose_four(params, x, depth)?;
            let verdict = verify_certificate(params, &certificate);
            Ok(SweepEntry {
                certificate,
                valid: verdict.valid,
                reasons: verdict.reasons,
            })
        })
        .collect()
}
