//! Command-line front end for the modal rule-synthesis toolkit.
//!
//! Subcommands: `classify` decides analytic inductive membership, `run`
//! synthesizes a structural rule with its frame condition and a cut-free
//! derivation, `derive` renders derivations (and re-validates JSON reports),
//! `verify` model-checks a formula against a first-order frame condition,
//! and `frames` enumerates small frames.
//!
//! Exit codes are a stable contract:
//! 0 success; 1 negative answer (not analytic inductive, or a rendered
//! derivation failed re-validation); 2 input or usage error; 3 rule
//! synthesis failed; 4 a correspondence check found a counterexample.

use clap::{Args, Parser, Subcommand, ValueEnum};
use massa_core::{
    axiom_latex, check_proof, classify, corpus, corresponds, frame_satisfies, frames, parse,
    parse_fo, render_latex, render_text, rule_latex, run, Classification, CorpusParams,
    Correspondence, Formula, Frame, GeometricRule, MassaOutcome, ProofTree, RunReport,
    ValidationBudget,
};
use serde_json::{json, Value};
use std::io::{IsTerminal, Read};
use std::path::PathBuf;
use std::process::ExitCode;

const EXIT_OK: u8 = 0;
const EXIT_NO: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_STUCK: u8 = 3;
const EXIT_REFUTED: u8 = 4;

/// Largest frame size the enumeration subcommands accept.
const MAX_BOUND: i64 = 5;

#[derive(Parser)]
#[command(
    name = "massa",
    version,
    about = "Synthesize analytic structural rules and frame conditions from modal axioms"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether a formula is analytic inductive and print its decomposition
    Classify {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        format: ReportFormat,
    },
    /// Synthesize a rule, frame condition, and cut-free derivation for a formula
    Run {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value_t = RunFormat::Text)]
        format: RunFormat,
        /// Model-check the emitted condition against the formula on all
        /// frames with at most N worlds
        #[arg(long, value_name = "N", value_parser = clap::value_parser!(u8).range(1..=MAX_BOUND))]
        verify: Option<u8>,
        /// Read one formula per input line and report one JSON object per line
        #[arg(long)]
        batch: bool,
        /// Ignore the input and run on N generated formulas (JSON lines output)
        #[arg(long, value_name = "N", conflicts_with_all = ["batch", "formula", "file"])]
        corpus: Option<usize>,
        /// Seed for formula generation
        #[arg(long, value_name = "S", default_value_t = 0)]
        seed: u64,
        /// Atom budget for generated formulas and verification models
        #[arg(long, value_name = "N", default_value_t = 2)]
        max_atoms: usize,
    },
    /// Print just the derivation for a formula, or re-render (and re-check)
    /// the JSON report produced by `run --format json`
    Derive {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value_t = RenderFormat::Text)]
        format: RenderFormat,
    },
    /// Check that a modal formula and a first-order frame condition pick out
    /// the same frames, up to a size bound
    Verify {
        /// Modal formula
        formula: String,
        /// First-order frame condition, e.g. "forall x. exists y. x R y"
        condition: String,
        #[arg(long, value_name = "N", default_value_t = 3, value_parser = clap::value_parser!(u8).range(1..=MAX_BOUND))]
        bound: u8,
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        format: ReportFormat,
        /// Atom budget for the frame-validity check
        #[arg(long, value_name = "N", default_value_t = 2)]
        max_atoms: usize,
    },
    /// Enumerate Kripke frames up to a size bound
    Frames {
        #[arg(long, value_name = "N", default_value_t = 2, value_parser = clap::value_parser!(u8).range(1..=MAX_BOUND))]
        bound: u8,
        /// Keep only frames satisfying this first-order condition
        #[arg(long, value_name = "CONDITION")]
        satisfying: Option<String>,
        /// Print at most this many frames
        #[arg(long, value_name = "N", default_value_t = 20)]
        limit: usize,
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        format: ReportFormat,
    },
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Text,
    Json,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum RunFormat {
    Text,
    Json,
    Latex,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum RenderFormat {
    Text,
    Latex,
}

/// Where the formula text comes from: a positional argument, a file, or
/// standard input — exactly one.
#[derive(Args)]
struct Input {
    /// Formula text; standard input is read when this and --file are absent
    formula: Option<String>,
    /// Read the input from a file
    #[arg(long, value_name = "PATH", conflicts_with = "formula")]
    file: Option<PathBuf>,
}

impl Input {
    fn read(&self) -> Result<String, String> {
        match (&self.formula, &self.file) {
            (Some(text), None) => Ok(text.clone()),
            (None, Some(path)) => std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read {}: {e}", path.display())),
            (None, None) => {
                let mut text = String::new();
                std::io::stdin()
                    .read_to_string(&mut text)
                    .map_err(|e| format!("cannot read standard input: {e}"))?;
                Ok(text)
            }
            (Some(_), Some(_)) => unreachable!("rejected by clap"),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Classify { input, format } => cmd_classify(&input, format),
        Command::Run {
            input,
            format,
            verify,
            batch,
            corpus,
            seed,
            max_atoms,
        } => cmd_run(&input, format, verify, batch, corpus, seed, max_atoms),
        Command::Derive { input, format } => cmd_derive(&input, format),
        Command::Verify {
            formula,
            condition,
            bound,
            format,
            max_atoms,
        } => cmd_verify(&formula, &condition, bound, format, max_atoms),
        Command::Frames {
            bound,
            satisfying,
            limit,
            format,
        } => cmd_frames(bound, satisfying.as_deref(), limit, format),
    };
    ExitCode::from(code)
}

fn fail(code: u8, message: &str) -> u8 {
    eprintln!("error: {message}");
    code
}

fn parse_or_usage(text: &str) -> Result<Formula, u8> {
    parse(text).map_err(|e| fail(EXIT_USAGE, &e.to_string()))
}

/// Whether text output may use ANSI colour: `MASSA_COLOR=never` disables it,
/// otherwise (`auto` or unset) colour is used when stdout is a terminal.
fn use_colour() -> bool {
    match std::env::var("MASSA_COLOR") {
        Ok(v) if v == "never" => false,
        _ => std::io::stdout().is_terminal(),
    }
}

// ---------------------------------------------------------------------------
// classify
// ---------------------------------------------------------------------------

fn classification_summary(c: &Classification) -> String {
    match c {
        Classification::NotNnfReducible { reason } => {
            format!("not reducible to normal form: {reason}")
        }
        Classification::NotAnalyticInductive { reason } => {
            format!("not analytic inductive: {reason}")
        }
        Classification::AnalyticInductive { conjuncts } => {
            let kind = if conjuncts.iter().all(|a| a.sahlqvist) {
                "analytic Sahlqvist"
            } else {
                "analytic inductive"
            };
            let shape = match conjuncts.as_slice() {
                [only] if only.definite => "definite".to_string(),
                [_] => "one normalized conjunct".to_string(),
                many => format!("{} normalized conjuncts", many.len()),
            };
            format!("{kind} ({shape})")
        }
    }
}

fn cmd_classify(input: &Input, format: ReportFormat) -> u8 {
    let text = match input.read() {
        Ok(t) => t,
        Err(e) => return fail(EXIT_USAGE, &e),
    };
    let formula = match parse_or_usage(text.trim()) {
        Ok(f) => f,
        Err(code) => return code,
    };
    let classification = classify(&formula);
    match format {
        ReportFormat::Json => {
            let v = json!({
                "formula": formula.to_string(),
                "classification": classification.to_json(),
            });
            println!("{}", serde_json::to_string_pretty(&v).expect("valid JSON"));
        }
        ReportFormat::Text => {
            println!("formula: {formula}");
            println!("status: {}", classification_summary(&classification));
            if let Classification::AnalyticInductive { conjuncts } = &classification {
                for (i, a) in conjuncts.iter().enumerate() {
                    println!("conjunct {}: {}", i + 1, a.conjunct);
                    println!("  skeleton: {}", a.skeleton);
                    if a.betas.is_empty() {
                        println!("  negative parts: (none)");
                    }
                    for b in &a.betas {
                        println!("  negative part: {}  (critical: {})", b.formula, b.critical);
                    }
                    for d in &a.deltas {
                        if d.vars.is_empty() {
                            println!("  positive part: {}", d.formula);
                        } else {
                            println!(
                                "  positive part: {}  (variables: {})",
                                d.formula,
                                d.vars.join(", ")
                            );
                        }
                    }
                    if a.omega.is_empty() {
                        println!("  dependence order: (empty)");
                    } else {
                        let pairs: Vec<String> = a
                            .omega
                            .iter()
                            .map(|(lo, hi)| format!("{lo} < {hi}"))
                            .collect();
                        println!("  dependence order: {}", pairs.join(", "));
                    }
                }
            }
        }
    }
    if classification.analytic_inductive() {
        EXIT_OK
    } else {
        EXIT_NO
    }
}

// ---------------------------------------------------------------------------
// run
// ---------------------------------------------------------------------------

/// Result of model-checking one synthesized condition against its conjunct.
enum Verification {
    Agrees { bound: u8, frames_checked: u64 },
    Disagrees { bound: u8, frame: Frame, lhs: bool, rhs: bool },
}

impl Verification {
    fn to_json(&self) -> Value {
        match self {
            Verification::Agrees {
                bound,
                frames_checked,
            } => json!({
                "bound": bound,
                "holds": true,
                "frames_checked": frames_checked,
            }),
            Verification::Disagrees {
                bound,
                frame,
                lhs,
                rhs,
            } => json!({
                "bound": bound,
                "holds": false,
                "frame": frame_json(frame),
                "formula_valid": lhs,
                "condition_holds": rhs,
            }),
        }
    }

    fn summary(&self) -> String {
        match self {
            Verification::Agrees {
                bound,
                frames_checked,
            } => format!(
                "formula and condition agree on all frames with at most {bound} worlds ({frames_checked} frames)"
            ),
            Verification::Disagrees {
                frame, lhs, rhs, ..
            } => format!(
                "counterexample {frame}: formula valid: {lhs}, condition holds: {rhs}"
            ),
        }
    }
}

fn frame_json(frame: &Frame) -> Value {
    json!({
        "n": frame.n(),
        "edges": frame.edges().iter().map(|&(u, v)| json!([u, v])).collect::<Vec<_>>(),
    })
}

/// Check each successful conjunct's condition against that conjunct.
/// Returns one entry per run (None for failed runs) or an error message.
fn verify_report(
    report: &RunReport,
    bound: u8,
    max_atoms: usize,
) -> Result<Vec<Option<Verification>>, String> {
    let budget = ValidationBudget { max_atoms };
    let mut out = Vec::with_capacity(report.runs.len());
    for r in &report.runs {
        match &r.outcome {
            MassaOutcome::Failure(_) => out.push(None),
            MassaOutcome::Success(s) => {
                let fo = s.axiom.to_fo();
                match corresponds(&r.conjunct, &fo, bound, &budget) {
                    Ok(Correspondence::Holds { frames_checked }) => {
                        out.push(Some(Verification::Agrees {
                            bound,
                            frames_checked,
                        }))
                    }
                    Ok(Correspondence::Counterexample { frame, lhs, rhs }) => {
                        out.push(Some(Verification::Disagrees {
                            bound,
                            frame,
                            lhs,
                            rhs,
                        }))
                    }
                    Err(e) => return Err(format!("{e} (see --max-atoms)")),
                }
            }
        }
    }
    Ok(out)
}

fn run_exit_code(report: &RunReport, verifications: &[Option<Verification>]) -> u8 {
    if !report.success() {
        return EXIT_STUCK;
    }
    if verifications
        .iter()
        .flatten()
        .any(|v| matches!(v, Verification::Disagrees { .. }))
    {
        return EXIT_REFUTED;
    }
    EXIT_OK
}

fn report_json(report: &RunReport, verifications: &[Option<Verification>]) -> Value {
    let mut v = report.to_json();
    if let (Some(_), Some(ver)) = (report.sole_outcome(), verifications.first()) {
        if let Some(ver) = ver {
            v["verification"] = ver.to_json();
        }
    } else if let Some(results) = v.get_mut("results").and_then(Value::as_array_mut) {
        for (slot, ver) in results.iter_mut().zip(verifications) {
            if let Some(ver) = ver {
                slot["verification"] = ver.to_json();
            }
        }
    }
    v
}

fn print_outcome_text(outcome: &MassaOutcome, verification: Option<&Verification>, colour: bool) {
    match outcome {
        MassaOutcome::Success(s) => {
            match &s.rule {
                Some(rule) => println!("{rule}"),
                None => println!("rule: none needed (derivable in the base calculus)"),
            }
            println!("raw condition:        {}", s.raw_axiom);
            println!("simplified condition: {}", s.axiom);
            println!("derivation:");
            print!("{}", render_text(&s.derivation, colour));
        }
        MassaOutcome::Failure(f) => {
            println!("failed at {}: {}", f.stage.as_str(), f.reason);
            if !f.witness.is_empty() {
                println!("sequents under consideration:");
                for seq in &f.witness {
                    println!("  {seq}");
                }
            }
        }
    }
    if let Some(v) = verification {
        println!("verification: {}", v.summary());
    }
}

fn print_report_text(
    report: &RunReport,
    verifications: &[Option<Verification>],
    colour: bool,
) {
    println!("formula: {}", report.formula);
    println!(
        "classification: {}",
        classification_summary(&report.classification)
    );
    let single = report.runs.len() == 1;
    for (i, r) in report.runs.iter().enumerate() {
        if !single {
            println!("-- conjunct {}: {}", i + 1, r.conjunct);
        }
        print_outcome_text(&r.outcome, verifications.get(i).and_then(Option::as_ref), colour);
    }
}

/// Stand-alone LaTeX document showing, per conjunct, the rule scheme, the
/// frame condition, and the derivation.
fn report_latex(report: &RunReport) -> Result<String, String> {
    let mut body = String::new();
    for (i, r) in report.runs.iter().enumerate() {
        let s = match &r.outcome {
            MassaOutcome::Success(s) => s,
            MassaOutcome::Failure(f) => {
                return Err(format!(
                    "`{}` failed at {}: {}",
                    r.conjunct,
                    f.stage.as_str(),
                    f.reason
                ))
            }
        };
        if report.runs.len() > 1 {
            body.push_str(&format!(
                "\\section*{{Conjunct {}: \\(\\mathit{{{}}}\\)}}\n",
                i + 1,
                massa_core::latex_formula(&r.conjunct)
            ));
        }
        if let Some(rule) = &s.rule {
            body.push_str("Rule scheme:\n\n");
            body.push_str(&rule_latex(rule));
            body.push('\n');
        }
        body.push_str(&format!(
            "Frame condition: \\({}\\)\n\n",
            axiom_latex(&s.axiom)
        ));
        body.push_str("Derivation:\n\n");
        body.push_str(&render_latex(&s.derivation));
        body.push('\n');
    }
    Ok(latex_document(&body))
}

fn latex_document(body: &str) -> String {
    format!(
        "\\documentclass{{article}}\n\\usepackage{{amssymb}}\n\\usepackage{{bussproofs}}\n\
         \\begin{{document}}\n{body}\\end{{document}}\n"
    )
}

#[allow(clippy::too_many_arguments)]
fn cmd_run(
    input: &Input,
    format: RunFormat,
    verify: Option<u8>,
    batch: bool,
    corpus_count: Option<usize>,
    seed: u64,
    max_atoms: usize,
) -> u8 {
    // Collect the formulas to run on: a generated corpus, one per input
    // line, or a single input.
    let formulas: Vec<Formula> = if let Some(count) = corpus_count {
        let params = CorpusParams {
            max_atoms,
            skeleton_depth: 3,
            part_depth: 2,
        };
        corpus(seed, count, &params)
    } else {
        let text = match input.read() {
            Ok(t) => t,
            Err(e) => return fail(EXIT_USAGE, &e),
        };
        if batch {
            let mut out = Vec::new();
            for line in text.lines() {
                let line = line.trim();
                if line.is_empty() {
                    continue;
                }
                match parse_or_usage(line) {
                    Ok(f) => out.push(f),
                    Err(code) => return code,
                }
            }
            out
        } else {
            match parse_or_usage(text.trim()) {
                Ok(f) => vec![f],
                Err(code) => return code,
            }
        }
    };

    let multi = batch || corpus_count.is_some();
    let colour = use_colour();
    let mut worst = EXIT_OK;
    for (i, formula) in formulas.iter().enumerate() {
        let report = run(formula);
        let verifications = match verify {
            Some(bound) => match verify_report(&report, bound, max_atoms) {
                Ok(v) => v,
                Err(e) => return fail(EXIT_USAGE, &e),
            },
            None => vec![],
        };
        let code = run_exit_code(&report, &verifications);
        // Earlier-stage errors dominate the batch exit code.
        worst = match (worst, code) {
            (EXIT_OK, c) => c,
            (EXIT_STUCK, _) | (_, EXIT_STUCK) => EXIT_STUCK,
            (w, _) => w,
        };
        match format {
            RunFormat::Json if multi => {
                println!("{}", report_json(&report, &verifications))
            }
            RunFormat::Json => println!(
                "{}",
                serde_json::to_string_pretty(&report_json(&report, &verifications))
                    .expect("valid JSON")
            ),
            RunFormat::Text => {
                if i > 0 {
                    println!();
                }
                print_report_text(&report, &verifications, colour);
            }
            RunFormat::Latex => match report_latex(&report) {
                Ok(doc) => print!("{doc}"),
                Err(e) => return fail(EXIT_STUCK, &e),
            },
        }
    }
    worst
}

// ---------------------------------------------------------------------------
// derive
// ---------------------------------------------------------------------------

/// Extract `(rule, derivation)` pairs from a `run --format json` report.
fn derivations_from_report(v: &Value) -> Result<Vec<(Option<GeometricRule>, ProofTree)>, String> {
    let one = |o: &Value| -> Result<(Option<GeometricRule>, ProofTree), String> {
        let rule = match o.get("rule") {
            None | Some(Value::Null) => None,
            Some(r) => Some(GeometricRule::from_json(r)?),
        };
        let derivation = o
            .get("derivation")
            .ok_or("report has no `derivation` field")?;
        Ok((rule, ProofTree::from_json(derivation)?))
    };
    if let Some(results) = v.get("results").and_then(Value::as_array) {
        results.iter().map(one).collect()
    } else {
        Ok(vec![one(v)?])
    }
}

fn cmd_derive(input: &Input, format: RenderFormat) -> u8 {
    let text = match input.read() {
        Ok(t) => t,
        Err(e) => return fail(EXIT_USAGE, &e),
    };
    let text = text.trim();

    // A leading brace means a JSON report (one object, or one per line);
    // formulas never start with `{`.
    let pairs: Vec<(Option<GeometricRule>, ProofTree)> = if text.starts_with('{') {
        let values: Result<Vec<Value>, _> = match serde_json::from_str::<Value>(text) {
            Ok(v) => Ok(vec![v]),
            Err(_) => text.lines().map(serde_json::from_str::<Value>).collect(),
        };
        let values = match values {
            Ok(v) => v,
            Err(e) => return fail(EXIT_USAGE, &format!("malformed JSON report: {e}")),
        };
        let mut pairs = Vec::new();
        for v in &values {
            if v.get("status").and_then(Value::as_str) == Some("failure") {
                let reason = v.get("reason").and_then(Value::as_str).unwrap_or("unknown");
                return fail(EXIT_STUCK, &format!("report records a failed run: {reason}"));
            }
            match derivations_from_report(v) {
                Ok(mut p) => pairs.append(&mut p),
                Err(e) => return fail(EXIT_USAGE, &e),
            }
        }
        pairs
    } else {
        let formula = match parse_or_usage(text) {
            Ok(f) => f,
            Err(code) => return code,
        };
        let report = run(&formula);
        let mut pairs = Vec::new();
        for r in &report.runs {
            match &r.outcome {
                MassaOutcome::Success(s) => pairs.push((s.rule.clone(), s.derivation.clone())),
                MassaOutcome::Failure(f) => {
                    return fail(
                        EXIT_STUCK,
                        &format!("`{}` failed at {}: {}", r.conjunct, f.stage.as_str(), f.reason),
                    )
                }
            }
        }
        pairs
    };

    // Every rendered derivation must check out in the calculus extended
    // with its own rule.
    for (rule, tree) in &pairs {
        let rules: Vec<GeometricRule> = rule.iter().cloned().collect();
        match check_proof(tree, &rules) {
            Ok(check) if check.cut_free => {}
            Ok(_) => return fail(EXIT_NO, "derivation uses cut"),
            Err(e) => return fail(EXIT_NO, &format!("derivation does not check out: {e}")),
        }
    }

    match format {
        RenderFormat::Text => {
            let colour = use_colour();
            for (_, tree) in &pairs {
                print!("{}", render_text(tree, colour));
            }
        }
        RenderFormat::Latex => {
            let mut body = String::new();
            for (_, tree) in &pairs {
                body.push_str(&render_latex(tree));
            }
            print!("{}", latex_document(&body));
        }
    }
    EXIT_OK
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

fn cmd_verify(
    formula: &str,
    condition: &str,
    bound: u8,
    format: ReportFormat,
    max_atoms: usize,
) -> u8 {
    let formula = match parse_or_usage(formula) {
        Ok(f) => f,
        Err(code) => return code,
    };
    let condition = match parse_fo(condition) {
        Ok(c) => c,
        Err(e) => return fail(EXIT_USAGE, &format!("in the frame condition: {e}")),
    };
    let budget = ValidationBudget { max_atoms };
    let outcome = match corresponds(&formula, &condition, bound, &budget) {
        Ok(o) => o,
        Err(e) => return fail(EXIT_USAGE, &format!("{e} (see --max-atoms)")),
    };
    match outcome {
        Correspondence::Holds { frames_checked } => {
            match format {
                ReportFormat::Json => println!(
                    "{}",
                    json!({"holds": true, "bound": bound, "frames_checked": frames_checked})
                ),
                ReportFormat::Text => println!(
                    "correspondence holds on all frames with at most {bound} worlds ({frames_checked} frames)"
                ),
            }
            EXIT_OK
        }
        Correspondence::Counterexample { frame, lhs, rhs } => {
            match format {
                ReportFormat::Json => println!(
                    "{}",
                    json!({
                        "holds": false,
                        "bound": bound,
                        "frame": frame_json(&frame),
                        "formula_valid": lhs,
                        "condition_holds": rhs,
                    })
                ),
                ReportFormat::Text => {
                    println!("counterexample: {frame}");
                    println!("  formula valid there: {lhs}");
                    println!("  condition holds there: {rhs}");
                }
            }
            EXIT_REFUTED
        }
    }
}

// ---------------------------------------------------------------------------
// frames
// ---------------------------------------------------------------------------

fn cmd_frames(bound: u8, satisfying: Option<&str>, limit: usize, format: ReportFormat) -> u8 {
    let condition = match satisfying {
        Some(text) => match parse_fo(text) {
            Ok(c) => Some(c),
            Err(e) => return fail(EXIT_USAGE, &format!("in the frame condition: {e}")),
        },
        None => None,
    };
    let mut shown = Vec::new();
    let mut total: u64 = 0;
    for n in 1..=bound {
        for frame in frames(n) {
            if let Some(c) = &condition {
                match frame_satisfies(&frame, c) {
                    Ok(true) => {}
                    Ok(false) => continue,
                    Err(e) => return fail(EXIT_USAGE, &e.to_string()),
                }
            }
            total += 1;
            if shown.len() < limit {
                shown.push(frame);
            }
        }
    }
    match format {
        ReportFormat::Json => println!(
            "{}",
            json!({
                "bound": bound,
                "total": total,
                "frames": shown.iter().map(frame_json).collect::<Vec<_>>(),
            })
        ),
        ReportFormat::Text => {
            for frame in &shown {
                println!("{frame}");
            }
            println!(
                "{total} frame(s) with at most {bound} worlds{}; {} shown",
                if condition.is_some() {
                    " satisfy the condition"
                } else {
                    ""
                },
                shown.len()
            );
        }
    }
    EXIT_OK
}
