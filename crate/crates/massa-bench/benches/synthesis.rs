//! Timings for the syntactic half of the pipeline: classification, rule
//! synthesis, and re-checking the emitted derivation.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use massa_core::{check_proof, classify, parse, run, Formula, GeometricRule, MassaOutcome};

/// Representative axioms: one whose rule carries an eigenvariable and an
/// equality (directedness), one whose rule has two premises (connectedness),
/// one whose condition simplifies away (distribution), and one plain
/// relational one (transitivity).
const FORMULAS: &[(&str, &str)] = &[
    ("church_rosser", "dia box p -> box dia p"),
    ("connectedness", "box (box p -> q) | box (box q -> p)"),
    ("distribution", "box (p -> q) -> (box p -> box q)"),
    ("transitivity", "box p -> box box p"),
];

fn formula(text: &str) -> Formula {
    parse(text).expect("benchmark formula parses")
}

fn bench_classify(c: &mut Criterion) {
    let mut group = c.benchmark_group("classify");
    for (name, text) in FORMULAS {
        let f = formula(text);
        group.bench_with_input(BenchmarkId::from_parameter(name), &f, |b, f| {
            b.iter(|| classify(black_box(f)))
        });
    }
    group.finish();
}

fn bench_synthesize(c: &mut Criterion) {
    let mut group = c.benchmark_group("synthesize");
    for (name, text) in FORMULAS {
        let f = formula(text);
        group.bench_with_input(BenchmarkId::from_parameter(name), &f, |b, f| {
            b.iter(|| run(black_box(f)))
        });
    }
    group.finish();
}

fn bench_check_proof(c: &mut Criterion) {
    let mut group = c.benchmark_group("check_proof");
    for (name, text) in FORMULAS {
        let report = run(&formula(text));
        let success = match report.sole_outcome() {
            Some(MassaOutcome::Success(s)) => s.clone(),
            _ => panic!("benchmark formula {name} must synthesize"),
        };
        let rules: Vec<GeometricRule> = success.rule.clone().into_iter().collect();
        group.bench_with_input(
            BenchmarkId::from_parameter(name),
            &(success.derivation, rules),
            |b, (tree, rules)| b.iter(|| check_proof(black_box(tree), rules)),
        );
    }
    group.finish();
}

criterion_group!(benches, bench_classify, bench_synthesize, bench_check_proof);
criterion_main!(benches);
