use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use cantor_squares::cantor::DEFAULT_LEVEL_CAP;
use cantor_squares::image::{CoverReport, DEFAULT_BOX_CAP};
use cantor_squares::inequalities::{full_audit, Check};
use cantor_squares::lemma::{base_boxes, poly_a, poly_b};
use cantor_squares::rational::{decimal_preview, parse_rational, to_pq};
use cantor_squares::sweep::{lemma_audit, LemmaAudit};
use cantor_squares::{
    decompose_four, gap_check, verify_certificate, Certificate, Error, ImageEngine, ImageMap, ImageRequest,
    IntervalUnion, QInterval, QParams, QUnion, Rational,
};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

#[derive(Parser, Debug)]
#[command(name = "cantor-squares", version, about = "Sums of squares of middle-1/alpha Cantor set points")]
struct Cli {
    /// Dissection parameter: "p/q", an integer, or a terminating decimal.
    #[arg(long, global = true, default_value = "3")]
    alpha: String,

    #[arg(long, global = true, value_enum, default_value_t = Output::Json)]
    output: Output,

    /// Largest number of boxes a single image computation may enumerate.
    #[arg(long, global = true, env = "CANTOR_SQUARES_BOX_CAP", default_value_t = DEFAULT_BOX_CAP as u64)]
    box_cap: u64,

    /// Largest 2^n a level enumeration may produce.
    #[arg(long, global = true, env = "CANTOR_SQUARES_LEVEL_CAP", default_value_t = DEFAULT_LEVEL_CAP)]
    level_cap: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Output {
    Json,
    Human,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write x in [0, 4] as a sum of four squares of Cantor points.
    Decompose {
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, default_value_t = 40)]
        depth: usize,
        /// Also write the certificate JSON to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact image of F_n^k under a sum-of-squares, sum, or difference map.
    Image {
        #[arg(long)]
        level: usize,
        #[arg(long)]
        arity: usize,
        #[arg(long, default_value = "sq")]
        map: String,
    },
    /// Report the gap (4r^2, (1-r)^2) that rules out alpha < 3.
    GapCheck,
    /// Exhaustive check of the overlap and invariance lemmas over small levels.
    VerifyLemmas {
        #[arg(long, default_value_t = 5)]
        max_level: usize,
        /// Levels of the inequality audit that use every box; deeper levels are sampled.
        #[arg(long, default_value_t = 3)]
        exhaustive_level: usize,
        /// Random boxes for the closed-form comparison and per sampled level.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Per-level containment of the known three-square intervals and of [0, 4].
    CoverReport {
        #[arg(long, default_value_t = 5)]
        max_level: usize,
    },
    /// Check a certificate file.
    Verify { path: PathBuf },
}

/// Outcome of a command that ran to completion.
struct Done {
    json: serde_json::Value,
    human: String,
    ok: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let output = cli.output;
    match run(cli) {
        Ok(done) => {
            match output {
                Output::Json => println!("{}", serde_json::to_string_pretty(&done.json).expect("json")),
                Output::Human => print!("{}", done.human),
            }
            if done.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            let body = json!({ "error": { "kind": kind(&e), "message": e.to_string() } });
            match output {
                Output::Json => println!("{}", serde_json::to_string_pretty(&body).expect("json")),
                Output::Human => eprintln!("error: {e}"),
            }
            ExitCode::from(2)
        }
    }
}

fn kind(e: &Error) -> &'static str {
    match e {
        Error::MalformedInterval { .. } => "malformed_interval",
        Error::NegativeEndpoint(_) => "negative_endpoint",
        Error::DivisionByZero => "division_by_zero",
        Error::AlphaTooSmall(_) => "alpha_too_small",
        Error::ThinRegime(_) => "thin_regime",
        Error::CapExceeded { .. } => "cap_exceeded",
        Error::NotOnGrid { .. } => "not_on_grid",
        Error::OutOfRange { .. } => "out_of_range",
        Error::UnsupportedArity(_) => "unsupported_arity",
        Error::NoCandidate { .. } => "no_candidate",
        Error::Precondition(_) => "precondition",
        Error::Inconsistency(_) => "inconsistency",
        Error::Parse(_) => "parse",
    }
}

fn to_value<S: Serialize>(v: &S) -> serde_json::Value {
    serde_json::to_value(v).expect("serializable")
}

fn show(v: &Rational) -> String {
    format!("{} ~ {}", to_pq(v), decimal_preview(v, 30))
}

fn show_union(u: &QUnion) -> String {
    if u.is_empty() {
        return "  (empty)\n".into();
    }
    u.parts()
        .iter()
        .map(|i| format!("  [{}, {}]\n", show(i.lo()), show(i.hi())))
        .collect()
}

fn run(cli: Cli) -> Result<Done, Error> {
    let alpha = parse_rational(&cli.alpha)?;
    let params = QParams::new(alpha)?;
    let box_cap = u128::from(cli.box_cap);
    match cli.command {
        Command::Decompose { x, depth, out } => decompose(&params, &parse_rational(&x)?, depth, out),
        Command::Image { level, arity, map } => {
            let map: ImageMap = map.parse()?;
            let engine = ImageEngine::new(params).with_box_cap(box_cap).with_level_cap(cli.level_cap);
            let result = engine.image(&ImageRequest::new(level, arity, map))?;
            let human = format!(
                "{map} image of F_{level}^{arity}:\n{}measure {}\nboxes {}\n",
                show_union(&result.union),
                show(&result.union.measure()),
                result.boxes_enumerated
            );
            Ok(Done {
                json: to_value(&*result),
                human,
                ok: true,
            })
        }
        Command::GapCheck => {
            let gap = gap_check(&params)?;
            let human = match &gap {
                Some(g) => format!("gap ({}, {})\n", show(g.closure.lo()), show(g.closure.hi())),
                None => "no gap (alpha >= 3)\n".into(),
            };
            Ok(Done {
                json: json!({ "alpha": to_pq(params.alpha()), "gap": gap }),
                human,
                ok: true,
            })
        }
        Command::VerifyLemmas {
            max_level,
            exhaustive_level,
            samples,
            seed,
        } => verify_lemmas(&params, max_level, exhaustive_level, samples, seed, box_cap),
        Command::CoverReport { max_level } => {
            let engine = ImageEngine::new(params.clone()).with_box_cap(box_cap).with_level_cap(cli.level_cap);
            let r = params.ratio();
            // Checks the thick regime before any enumeration.
            base_boxes(&params)?;
            let three = IntervalUnion::from_bounds([
                (poly_a(r), poly_b(r)),
                (Rational::from_integer(2.into()) * params.one_minus_ratio().pow(2), Rational::from_integer(3.into())),
            ])?;
            let four = IntervalUnion::single(QInterval::new(
                Rational::from_integer(0.into()),
                Rational::from_integer(4.into()),
            )?);
            let three_squares = engine.cover_report(&three, 3, max_level)?;
            let four_squares = engine.cover_report(&four, 4, max_level)?;
            let ok = three_squares.pass && four_squares.pass;
            let human = format!("{}{}", cover_table(&three_squares), cover_table(&four_squares));
            Ok(Done {
                json: json!({ "three_squares": three_squares, "four_squares": four_squares, "pass": ok }),
                human,
                ok,
            })
        }
        Command::Verify { path } => {
            let text = fs::read_to_string(&path)
                .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
            let cert = Certificate::from_json(&text)?;
            let cert_params = QParams::new(cert.alpha.clone())?;
            let verdict = verify_certificate(&cert_params, &cert);
            let human = if verdict.valid {
                format!("certificate for x = {} is valid\n", show(&cert.x))
            } else {
                let mut s = format!("certificate for x = {} is INVALID\n", show(&cert.x));
                for r in &verdict.reasons {
                    s.push_str(&format!("  - {r}\n"));
                }
                s
            };
            Ok(Done {
                json: to_value(&verdict),
                human,
                ok: verdict.valid,
            })
        }
    }
}

fn decompose(params: &QParams, x: &Rational, depth: usize, out: Option<PathBuf>) -> Result<Done, Error> {
    let cert = decompose_four(params, x, depth)?;
    let verdict = verify_certificate(params, &cert);
    let text = cert.to_json();
    if let Some(path) = out {
        fs::write(&path, &text).map_err(|e| Error::Parse(format!("cannot write {}: {e}", path.display())))?;
    }
    let mut human = format!("x = {}\ncase: {}\n", show(&cert.x), cert.case);
    for (p, v) in cert.points.iter().zip(&cert.values) {
        human.push_str(&format!("  {p}  = {}\n", show(v)));
    }
    human.push_str(&format!(
        "residual {}\nbound    {}\nverified: {}\n",
        show(&cert.residual),
        show(&cert.bound),
        verdict.valid
    ));
    for r in &verdict.reasons {
        human.push_str(&format!("  - {r}\n"));
    }
    Ok(Done {
        json: serde_json::from_str(&text).expect("certificate json"),
        human,
        ok: verdict.valid,
    })
}

fn verify_lemmas(
    params: &QParams,
    max_level: usize,
    exhaustive_level: usize,
    samples: usize,
    seed: u64,
    box_cap: u128,
) -> Result<Done, Error> {
    let audit: LemmaAudit = lemma_audit(params, max_level, box_cap, samples, seed)?;
    let checks: Vec<Check<Rational>> = full_audit(params, exhaustive_level, max_level.max(1), samples / 10, seed)?;
    let failed: Vec<&Check<Rational>> = checks.iter().filter(|c| !c.holds()).collect();
    let ok = audit.pass && failed.is_empty();

    let mut human = format!("lemma audit at alpha = {}\n", to_pq(params.alpha()));
    human.push_str("level  triples  overlap  failures  invariant  failures\n");
    for l in &audit.levels {
        human.push_str(&format!(
            "{:>5}  {:>7}  {:>7}  {:>8}  {:>9}  {:>8}\n",
            l.level, l.triples, l.overlap_boxes, l.overlap_failures, l.invariant_boxes, l.invariant_failures
        ));
    }
    human.push_str(&format!(
        "closed forms: {} random boxes, {} mismatches\ninequalities: {} checked, {} failed\n",
        audit.closed_form_samples,
        audit.closed_form_failures,
        checks.len(),
        failed.len()
    ));
    for f in audit.failures.iter().take(20) {
        human.push_str(&format!("  - {f}\n"));
    }
    for c in failed.iter().take(20) {
        human.push_str(&format!("  - {}: {:?}\n", c.name, c.failures()));
    }
    human.push_str(if ok { "all pass\n" } else { "FAILURES\n" });

    let json = json!({
        "audit": audit,
        "inequalities": { "checked": checks.len(), "failed": failed.len(), "failures": failed.iter().take(20).collect::<Vec<_>>() },
        "pass": ok,
    });
    Ok(Done { json, human, ok })
}

fn cover_table(report: &CoverReport<Rational>) -> String {
    let mut s = format!("sum of {} squares, claimed:\n{}", report.arity, show_union(&report.claimed));
    s.push_str("level  contained  parts  boxes\n");
    for l in &report.levels {
        s.push_str(&format!(
            "{:>5}  {:>9}  {:>5}  {}\n",
            l.level, l.contained, l.image_parts, l.boxes_enumerated
        ));
    }
    s
}
