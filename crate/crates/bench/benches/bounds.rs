use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use icap::geometry::{fm_project, vertex_enumerate};
use icap::{
    canonical_key, composite_member, composite_region_fixed, enumerate_problems,
    flat_timeshare_region, outer_region, parse_problem, symmetric_capacity, verify_capacity,
    DecodingConfig, MsgSet, Problem, Rational,
};

fn example_two() -> Problem {
    parse_problem("(1|4),(2|3,4),(3|1,2),(4|2,3)").unwrap()
}

fn bench_enumeration(c: &mut Criterion) {
    let mut g = c.benchmark_group("enumerate");
    for n in [3usize, 4] {
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| enumerate_problems(n).unwrap().count())
        });
    }
    g.finish();
    let p = Problem::symmetric(6, 1, 2).unwrap();
    c.bench_function("canonical_key/6", |b| b.iter(|| canonical_key(black_box(&p)).unwrap()));
}

fn bench_outer(c: &mut Criterion) {
    let mut g = c.benchmark_group("outer_region");
    for (name, p) in [
        ("example_two", example_two()),
        ("five_cycle", Problem::symmetric(5, 1, 1).unwrap()),
        ("six_message", Problem::symmetric(6, 1, 2).unwrap()),
    ] {
        g.bench_function(name, |b| b.iter(|| outer_region(black_box(&p)).unwrap()));
    }
    g.finish();
}

fn bench_inner(c: &mut Criterion) {
    let p = Problem::symmetric(5, 1, 1).unwrap();
    let point = vec![Rational::new(2, 5); 5];
    c.bench_function("composite_member/five_cycle", |b| {
        b.iter(|| composite_member(black_box(&p), black_box(&point)).unwrap())
    });
    let e2 = example_two();
    c.bench_function("flat_timeshare/example_two", |b| {
        b.iter(|| flat_timeshare_region(black_box(&e2)).unwrap())
    });
    let six = Problem::symmetric(6, 1, 2).unwrap();
    let mut support: Vec<MsgSet> = (1..=6).map(MsgSet::singleton).collect();
    support.extend((1..=6).map(|j| MsgSet::from_indices([j, j % 6 + 1])));
    c.bench_function("composite_region_fixed/six_message", |b| {
        b.iter(|| composite_region_fixed(&six, &DecodingConfig::own_only(6), black_box(&support)).unwrap())
    });
    c.bench_function("symmetric_capacity/six_message", |b| {
        b.iter(|| symmetric_capacity(black_box(&six)).unwrap())
    });
}

fn bench_geometry(c: &mut Criterion) {
    let lifted = icap::build_lifted_outer(&Problem::symmetric(3, 1, 0).unwrap()).unwrap();
    c.bench_function("vertex_enumerate/lifted_three", |b| {
        b.iter(|| vertex_enumerate(black_box(lifted.system())).unwrap())
    });
    let t_names: Vec<String> = lifted.system().vars()[3..].to_vec();
    let drop: Vec<&str> = t_names.iter().map(String::as_str).collect();
    c.bench_function("fm_project/lifted_three", |b| {
        b.iter(|| fm_project(black_box(lifted.system()), &drop).unwrap())
    });
}

fn bench_verify(c: &mut Criterion) {
    let mut g = c.benchmark_group("verify");
    g.sample_size(10);
    let e2 = example_two();
    g.bench_function("example_two", |b| b.iter(|| verify_capacity(black_box(&e2)).unwrap()));
    g.bench_function("sweep_three", |b| {
        b.iter(|| {
            enumerate_problems(3)
                .unwrap()
                .filter(|p| verify_capacity(p).unwrap().matched)
                .count()
        })
    });
    g.finish();
}

criterion_group!(benches, bench_enumeration, bench_outer, bench_inner, bench_geometry, bench_verify);
criterion_main!(benches);
