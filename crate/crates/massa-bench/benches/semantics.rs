//! Timings for the semantic half of the pipeline: exhaustive frame
//! enumeration, modal validation, and modal/first-order correspondence.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use massa_core::{
    corresponds, frame_validates, frames, parse, parse_fo, Formula, ValidationBudget,
};

fn formula(text: &str) -> Formula {
    parse(text).expect("benchmark formula parses")
}

fn bench_enumerate(c: &mut Criterion) {
    let mut group = c.benchmark_group("frames/enumerate");
    for n in [3u8, 4] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| (1..=n).map(|k| frames(k).count()).sum::<usize>())
        });
    }
    group.finish();
}

fn bench_validate(c: &mut Criterion) {
    let mut group = c.benchmark_group("frames/validate");
    let budget = ValidationBudget::default();
    for (name, text) in [
        ("distribution", "box (p -> q) -> (box p -> box q)"),
        ("t_axiom", "box p -> p"),
    ] {
        let f = formula(text);
        group.bench_with_input(BenchmarkId::from_parameter(name), &f, |b, f| {
            b.iter(|| {
                let mut valid = 0usize;
                for n in 1..=3 {
                    for frame in frames(n) {
                        if frame_validates(black_box(&frame), f, &budget).expect("within budget") {
                            valid += 1;
                        }
                    }
                }
                valid
            })
        });
    }
    group.finish();
}

fn bench_corresponds(c: &mut Criterion) {
    let mut group = c.benchmark_group("corresponds");
    group.sample_size(10);
    let budget = ValidationBudget::default();
    let cases = [
        ("t_axiom_reflexivity", "box p -> p", "forall x. x R x", 3u8),
        (
            "church_rosser_directedness",
            "dia box p -> box dia p",
            "forall x y z. (x R y & x R z) -> exists t. (y R t & z R t)",
            3,
        ),
        (
            "church_rosser_directedness_bound_4",
            "dia box p -> box dia p",
            "forall x y z. (x R y & x R z) -> exists t. (y R t & z R t)",
            4,
        ),
    ];
    for (name, text, condition, bound) in cases {
        let f = formula(text);
        let fo = parse_fo(condition).expect("benchmark condition parses");
        group.bench_with_input(
            BenchmarkId::from_parameter(name),
            &(f, fo),
            |b, (f, fo)| {
                b.iter(|| corresponds(black_box(f), fo, bound, &budget).expect("within bounds"))
            },
        );
    }
    group.finish();
}

criterion_group!(benches, bench_enumerate, bench_validate, bench_corresponds);
criterion_main!(benches);
