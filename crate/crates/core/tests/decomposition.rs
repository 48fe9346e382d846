//! End-to-end decomposition: worked inputs, boundary inputs, tampering,
//! determinism and the convergence rate of the bound.

use std::collections::BTreeMap;

use cantor_squares::cantor::point_value;
use cantor_squares::decompose::{choose_fourth, scaling_reduce, FourthChoice};
use cantor_squares::lemma::BaseFamily;
use cantor_squares::sweep::{decomposition_sweep, random_inputs};
use cantor_squares::{decompose_four, verify_certificate, CantorParams, Certificate, ChildIndex, QParams, Rational, Tail};
use num_traits::{Signed, Zero};
use proptest::prelude::*;

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn params(alpha: Rational) -> QParams {
    CantorParams::new(alpha).unwrap()
}

fn pow(r: &Rational, n: usize) -> Rational {
    (0..n).fold(q(1, 1), |acc, _| acc * r)
}

/// Independent recomputation of `x - Σ value^2` from the stored words.
fn residual_from_words(p: &QParams, cert: &Certificate) -> Rational {
    cert.points.iter().fold(cert.x.clone(), |acc, pt| {
        let v = point_value(p, pt);
        acc - &v * &v
    })
}

fn assert_sound(p: &QParams, cert: &Certificate, limit: &Rational) {
    let verdict = verify_certificate(p, cert);
    assert!(verdict.valid, "x = {}: {:?}", cert.x, verdict.reasons);
    let res = residual_from_words(p, cert);
    assert_eq!(res, cert.residual);
    assert!(!res.is_negative() && res <= cert.bound && cert.bound <= *limit, "x = {}", cert.x);
}

#[test]
fn two_at_depth_forty() {
    let p = params(q(3, 1));
    let cert = decompose_four(&p, &q(2, 1), 40).unwrap();
    assert_eq!(cert.fourth, FourthChoice::One);
    assert_eq!(cert.values[3], q(1, 1));
    assert_eq!(cert.trace.len(), 40);
    let r = q(1, 3);
    // 2 (u + v + w) r^41 + 3 r^82 with u + v + w <= 3.
    let limit = q(6, 1) * pow(&r, 41) + q(3, 1) * pow(&r, 82);
    assert_sound(&p, &cert, &limit);
}

#[test]
fn extremes_are_exact() {
    let p = params(q(3, 1));
    let zero = decompose_four(&p, &q(0, 1), 40).unwrap();
    assert!(zero.values.iter().all(Zero::is_zero));
    assert_sound(&p, &zero, &q(0, 1));

    let four = decompose_four(&p, &q(4, 1), 40).unwrap();
    assert!(four.values.iter().all(|v| *v == q(1, 1)));
    assert!(four.trace.iter().all(|c| *c == ChildIndex::new(1, 1, 1)));
    assert!(four.points[..3].iter().all(|pt| pt.tail == Tail::AllRight));
    assert!(four.residual.is_zero());
    assert_sound(&p, &four, &q(1, 1));
}

#[test]
fn scaling_boundaries_terminate() {
    let p = params(q(3, 1));
    // (1-r)^2 r^(2k): exactly on the excluded end of each scaled window.
    for k in 0..6 {
        let x = q(4, 9) * pow(&q(1, 9), k);
        let (s, y) = scaling_reduce(&p, &x).unwrap();
        assert_eq!((s, y), (k + 1, q(4, 1)));
        let cert = decompose_four(&p, &x, 20).unwrap();
        assert!(cert.residual.is_zero(), "x = {x}");
        assert_sound(&p, &cert, &q(1, 1));
    }
}

#[test]
fn boundary_inputs_verify() {
    let p = params(q(3, 1));
    let limit = q(6, 1) * pow(&q(1, 3), 40);
    let mut inputs = vec![q(0, 1), q(4, 1), q(4, 9), q(8, 9), q(17, 9), q(3, 1), q(1, 1), q(4, 3)];
    for k in 0..=3 {
        inputs.push(q(44, 81) * pow(&q(1, 9), k));
        inputs.push(q(67, 81) * pow(&q(1, 9), k));
    }
    for x in inputs {
        let cert = decompose_four(&p, &x, 40).unwrap();
        assert_sound(&p, &cert, &limit);
    }
}

#[test]
fn ab_lower_end_gives_zero_residual() {
    // y - (1-r)^2 = a(r) r^(2m) lands on the left end of the AB interval.
    let p = params(q(3, 1));
    let x = q(4, 9) + q(44, 81) * q(1, 9);
    let sel = choose_fourth(&p, &x, 8).unwrap();
    assert_eq!(sel.target.base, BaseFamily::Ab);
    let cert = decompose_four(&p, &x, 12).unwrap();
    assert!(cert.residual.is_zero());
    assert_sound(&p, &cert, &q(1, 1));
}

#[test]
fn thicker_sets_decompose_too() {
    for alpha in [q(4, 1), q(10, 1), q(7, 2)] {
        let p = params(alpha.clone());
        let r = p.ratio().clone();
        let limit = q(6, 1) * pow(&r, 30);
        for x in random_inputs(3, 40, 1000) {
            let cert = decompose_four(&p, &x, 30).unwrap();
            assert_sound(&p, &cert, &limit);
        }
    }
}

#[test]
fn tampering_is_detected() {
    let p = params(q(3, 1));
    let cert = decompose_four(&p, &q(13, 7), 20).unwrap();

    let mut c = cert.clone();
    c.values[0] += q(1, 1_000_000);
    assert!(!verify_certificate(&p, &c).valid);

    let mut c = cert.clone();
    c.scaling += 1;
    assert!(!verify_certificate(&p, &c).valid);

    let mut c = cert.clone();
    assert_eq!(c.case, "x4=0 -> MAIN m=0");
    c.case = "x4=1 -> MAIN m=0".into();
    assert!(!verify_certificate(&p, &c).valid);

    let mut c = cert.clone();
    c.trace.pop();
    assert!(!verify_certificate(&p, &c).valid);

    let mut c = cert.clone();
    c.bound = c.residual.clone();
    assert!(!verify_certificate(&p, &c).valid);

    let mut c = cert.clone();
    c.x += q(1, 3);
    assert!(!verify_certificate(&p, &c).valid);

    let mut c = cert;
    c.points.swap(0, 3);
    c.values.swap(0, 3);
    assert!(!verify_certificate(&p, &c).valid);
}

#[test]
fn json_from_disk_round_trips() {
    let p = params(q(3, 1));
    let dir = tempfile::tempdir().unwrap();
    for (i, x) in random_inputs(17, 10, 1_000_000).into_iter().enumerate() {
        let cert = decompose_four(&p, &x, 40).unwrap();
        let path = dir.path().join(format!("{i}.json"));
        std::fs::write(&path, cert.to_json()).unwrap();
        let back = Certificate::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(back, cert);
        assert!(verify_certificate(&p, &back).valid);
    }
}

#[test]
fn repeated_runs_are_byte_identical() {
    let p = params(q(3, 1));
    for x in random_inputs(99, 20, 1_000_000) {
        let a = decompose_four(&p, &x, 40).unwrap().to_json();
        let b = decompose_four(&p, &x, 40).unwrap().to_json();
        assert_eq!(a, b);
    }
}

#[test]
fn bound_shrinks_by_about_r_per_step() {
    let p = params(q(3, 1));
    let r = q(1, 3);
    for x in random_inputs(8, 25, 1_000_000) {
        if x.is_zero() {
            continue;
        }
        let mut prev = decompose_four(&p, &x, 1).unwrap().bound;
        for depth in 2..=30 {
            let cur = decompose_four(&p, &x, depth).unwrap();
            assert!(cur.bound < &prev * (&r + pow(&r, depth - 1)), "x = {x} depth {depth}");
            assert!(cur.bound <= q(6, 1) * pow(&r, depth));
            prev = cur.bound;
        }
    }
}

#[test]
fn thin_regime_is_refused() {
    for alpha in [q(2, 1), q(29, 10), q(5, 2)] {
        let p = params(alpha);
        assert!(decompose_four(&p, &q(1, 2), 10).is_err());
    }
}

#[test]
fn case_frequencies_over_a_sweep() {
    let p = params(q(3, 1));
    let inputs = random_inputs(42, 300, 1_000_000);
    let entries = decomposition_sweep(&p, &inputs, 20).unwrap();
    let mut freq: BTreeMap<String, usize> = BTreeMap::new();
    for e in &entries {
        assert!(e.valid, "{:?}", e.reasons);
        let c = &e.certificate;
        let kind = match c.fourth {
            FourthChoice::One => "x4=1",
            FourthChoice::Zero => "x4=0",
            FourthChoice::Shifted { .. } => "x4=1-r",
            FourthChoice::Raised { .. } => "x4=1-r+r^2n",
            FourthChoice::Dipped { .. } => "x4=1-r+r^(2n-1)-r^2n",
        };
        let base = c.target.map(|t| t.base.to_string()).unwrap_or_default();
        *freq.entry(format!("{kind} {base}")).or_default() += 1;
    }
    // Diagnostic only: which cases a random sweep reaches.
    eprintln!("case frequencies: {freq:?}");
    assert!(freq.contains_key("x4=1 MAIN") && freq.contains_key("x4=0 MAIN"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn any_rational_in_range_decomposes(num in 0u64..=4_000_000, den in 1u64..=1_000_000) {
        prop_assume!(num <= 4 * den);
        let p = params(q(3, 1));
        let x = Rational::new(num.into(), den.into());
        let cert = decompose_four(&p, &x, 15).unwrap();
        let verdict = verify_certificate(&p, &cert);
        prop_assert!(verdict.valid, "{:?}", verdict.reasons);
        prop_assert!(cert.bound <= q(6, 1) * pow(&q(1, 3), 15));
    }
}
