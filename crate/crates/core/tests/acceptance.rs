//! Acceptance suite: one pass/fail line per criterion, nonzero exit on any
//! failure. Run with `cargo test -p cantor-squares --test acceptance`.

use std::process::ExitCode;
use std::time::Instant;

use cantor_squares::inequalities::full_audit;
use cantor_squares::lemma::{poly_a, poly_b};
use cantor_squares::sweep::{decomposition_sweep, lemma_audit, random_inputs, SweepEntry};
use cantor_squares::{
    gap_check, CantorParams, ImageEngine, ImageMap, ImageRequest, Interval, IntervalUnion, QParams, Rational,
};
use num_traits::Signed;

const SWEEP_SEED: u64 = 20_240_601;
const SWEEP_SIZE: usize = 1000;
const DEPTH: usize = 40;

type Outcome = Result<String, String>;

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn params(alpha: Rational) -> QParams {
    CantorParams::new(alpha).expect("alpha > 1")
}

fn pow(r: &Rational, n: usize) -> Rational {
    (0..n).fold(q(1, 1), |acc, _| acc * r)
}

fn single(lo: Rational, hi: Rational) -> IntervalUnion<Rational> {
    IntervalUnion::single(Interval::new(lo, hi).expect("ordered"))
}

fn classical_identities() -> Outcome {
    let engine = ImageEngine::new(params(q(3, 1)));
    for n in 1..=10 {
        let diff = engine.image(&ImageRequest::new(n, 2, ImageMap::Difference)).map_err(|e| e.to_string())?;
        if diff.union != single(q(-1, 1), q(1, 1)) {
            return Err(format!("difference image at n = {n} is {}", diff.union));
        }
        let sum = engine.image(&ImageRequest::new(n, 2, ImageMap::Sum)).map_err(|e| e.to_string())?;
        if sum.union != single(q(0, 1), q(2, 1)) {
            return Err(format!("sum image at n = {n} is {}", sum.union));
        }
    }
    Ok("C-C = [-1,1] and C+C = [0,2] at n = 1..10".into())
}

fn four_square_cover() -> Outcome {
    let engine = ImageEngine::new(params(q(3, 1)));
    for n in 1..=5 {
        let img = engine.image(&ImageRequest::squares(n, 4)).map_err(|e| e.to_string())?;
        if img.union != single(q(0, 1), q(4, 1)) {
            return Err(format!("four-square image at n = {n} is {}", img.union));
        }
    }
    Ok("f(F_n^4) = [0,4] at n = 1..5".into())
}

fn three_square_containment() -> Outcome {
    let third = q(1, 3);
    if poly_a(&third) != q(44, 81) || poly_b(&third) != q(67, 81) {
        return Err("a(1/3), b(1/3) are not 44/81, 67/81".into());
    }
    for alpha in [q(3, 1), q(4, 1)] {
        let p = params(alpha.clone());
        let r = p.ratio().clone();
        let claimed = IntervalUnion::from_bounds([
            (poly_a(&r), poly_b(&r)),
            (q(2, 1) * p.one_minus_ratio() * p.one_minus_ratio(), q(3, 1)),
        ])
        .map_err(|e| e.to_string())?;
        let report = ImageEngine::new(p).cover_report(&claimed, 3, 5).map_err(|e| e.to_string())?;
        if !report.pass {
            return Err(format!("containment fails at alpha = {alpha}: {:?}", report.levels));
        }
    }
    Ok("[a,b] and [2(1-r)^2,3] inside g(F_n^3), n = 1..5, alpha in {3, 4}".into())
}

fn overlap_closure() -> Outcome {
    let mut closures = 0;
    for alpha in [q(3, 1), q(4, 1), q(10, 1)] {
        let samples = if alpha == q(3, 1) { 10_000 } else { 0 };
        let audit = lemma_audit(&params(alpha.clone()), 3, 1 << 20, samples, 7).map_err(|e| e.to_string())?;
        if !audit.pass {
            return Err(format!("alpha = {alpha}: {:?}", audit.failures));
        }
        closures += audit.levels.iter().map(|l| l.overlap_boxes).sum::<usize>();
    }
    Ok(format!(
        "{closures} overlap boxes closed (n <= 3, alpha in {{3, 4, 10}}); closed forms exact on 10^4 random boxes"
    ))
}

fn gap_converse() -> Outcome {
    for alpha in [q(2, 1), q(5, 2), q(29, 10)] {
        let p = params(alpha.clone());
        let r = p.ratio().clone();
        let lo = q(4, 1) * &r * &r;
        let hi = p.one_minus_ratio() * p.one_minus_ratio();
        if lo >= hi {
            return Err(format!("alpha = {alpha}: 4r^2 >= (1-r)^2"));
        }
        let gap = gap_check(&p).map_err(|e| e.to_string())?;
        match gap {
            Some(g) if g.closure.lo() == &lo && g.closure.hi() == &hi && g.open_lo && g.open_hi => {}
            other => return Err(format!("alpha = {alpha}: unexpected gap {other:?}")),
        }
        let img = ImageEngine::new(p).image(&ImageRequest::squares(1, 4)).map_err(|e| e.to_string())?;
        if img.union.meets_open(&lo, &hi) {
            return Err(format!("alpha = {alpha}: f(F_1^4) meets ({lo}, {hi})"));
        }
    }
    let p = params(q(3, 1));
    let r = p.ratio().clone();
    if q(4, 1) * &r * &r != q(4, 9) || p.one_minus_ratio() * p.one_minus_ratio() != q(4, 9) {
        return Err("alpha = 3: 4r^2 and (1-r)^2 are not both 4/9".into());
    }
    if gap_check(&p).map_err(|e| e.to_string())?.is_some() {
        return Err("alpha = 3 reports a gap".into());
    }
    Ok("gap (4r^2, (1-r)^2) missed at alpha in {2, 5/2, 29/10}; empty at alpha = 3".into())
}

fn sweep_inputs() -> Vec<Rational> {
    let mut inputs = vec![q(0, 1), q(4, 1), q(4, 9), q(8, 9), q(17, 9)];
    for k in 0..=3 {
        inputs.push(q(44, 81) * pow(&q(1, 9), k));
    }
    inputs.extend(random_inputs(SWEEP_SEED, SWEEP_SIZE, 1_000_000));
    inputs
}

fn run_sweep() -> Result<Vec<SweepEntry>, String> {
    decomposition_sweep(&params(q(3, 1)), &sweep_inputs(), DEPTH).map_err(|e| e.to_string())
}

fn write_all(entries: &[SweepEntry], dir: &std::path::Path) -> Result<(), String> {
    for (i, e) in entries.iter().enumerate() {
        std::fs::write(dir.join(format!("{i:04}.json")), e.certificate.to_json()).map_err(|e| e.to_string())?;
    }
    Ok(())
}

fn decomposition_soundness(first: &tempfile::TempDir) -> Outcome {
    let entries = run_sweep()?;
    let limit = q(6, 1) * pow(&q(1, 3), DEPTH);
    let mut worst = q(0, 1);
    for e in &entries {
        let c = &e.certificate;
        if !e.valid {
            return Err(format!("x = {}: {:?}", c.x, e.reasons));
        }
        if c.residual.is_negative() || c.residual > limit {
            return Err(format!("x = {}: residual {} outside [0, 6*3^-40]", c.x, c.residual));
        }
        if c.residual > worst {
            worst = c.residual.clone();
        }
    }
    write_all(&entries, first.path())?;
    Ok(format!(
        "{} certificates verified (1000 random + 9 boundary); max residual / 3^-40 = {}",
        entries.len(),
        cantor_squares::rational::decimal_preview(&(worst / pow(&q(1, 3), DEPTH)), 6)
    ))
}

fn inequality_audit() -> Outcome {
    let mut count = 0;
    for r in [q(1, 3), q(2, 5), q(49, 100)] {
        let p = params(q(1, 1) / (q(1, 1) - q(2, 1) * &r));
        let checks = full_audit(&p, 2, 10, 10, 3).map_err(|e| e.to_string())?;
        for group in ["overlap", "base", "cover"] {
            if !checks.iter().any(|c| c.group == group) {
                return Err(format!("no {group} checks at r = {r}"));
            }
        }
        if let Some(bad) = checks.iter().find(|c| !c.holds()) {
            return Err(format!("r = {r}: {} {:?}", bad.name, bad.failures()));
        }
        count += checks.len();
    }
    Ok(format!("{count} exact sign checks at r in {{1/3, 2/5, 49/100}}, n = 1..10"))
}

fn determinism(first: &tempfile::TempDir) -> Outcome {
    let second = tempfile::tempdir().map_err(|e| e.to_string())?;
    write_all(&run_sweep()?, second.path())?;
    let mut names: Vec<_> = std::fs::read_dir(first.path())
        .map_err(|e| e.to_string())?
        .map(|d| d.expect("dir entry").file_name())
        .collect();
    names.sort();
    if names.len() != SWEEP_SIZE + 9 {
        return Err(format!("expected {} files, found {}", SWEEP_SIZE + 9, names.len()));
    }
    for name in &names {
        let a = std::fs::read(first.path().join(name)).map_err(|e| e.to_string())?;
        let b = std::fs::read(second.path().join(name)).map_err(|e| e.to_string())?;
        if a != b {
            return Err(format!("{} differs between runs", name.to_string_lossy()));
        }
    }
    Ok(format!("{} certificate files byte-identical across two runs", names.len()))
}

fn main() -> ExitCode {
    let first = tempfile::tempdir().expect("temp dir");
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("1 classical identities", Box::new(classical_identities)),
        ("2 four-square cover", Box::new(four_square_cover)),
        ("3 three-square containment", Box::new(three_square_containment)),
        ("4 overlap closure", Box::new(overlap_closure)),
        ("5 gap below alpha 3", Box::new(gap_converse)),
        ("6 decomposition soundness", Box::new(|| decomposition_soundness(&first))),
        ("7 inequality audit", Box::new(inequality_audit)),
        ("8 determinism", Box::new(|| determinism(&first))),
    ];
    let mut failed = 0;
    for (name, run) in &criteria {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  criterion {name} ({secs:.2}s): {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  criterion {name} ({secs:.2}s): {why}");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
