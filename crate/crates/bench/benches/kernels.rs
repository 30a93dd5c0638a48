use criterion::{black_box, criterion_group, criterion_main, Criterion};

use rrmf_bench::{generic_path, generic_stream, helix_stream, hermite_data};
use rrmf_core::hermite;
use rrmf_core::spline::{self, KnotMode};

fn local_solve(c: &mut Criterion) {
    let d = hermite_data();
    c.bench_function("hermite_solve", |b| b.iter(|| hermite::solve(black_box(&d)).unwrap()));
}

fn spline_build(c: &mut Criterion) {
    let stream = generic_stream();
    c.bench_function("build_generic_stream", |b| {
        b.iter(|| spline::build(black_box(&stream), KnotMode::Chord, None).unwrap())
    });
    let (helix, tangents) = helix_stream(15);
    c.bench_function("build_helix_15", |b| {
        b.iter(|| spline::build(black_box(&helix), KnotMode::Uniform, Some(&tangents)).unwrap())
    });
}

fn evaluation(c: &mut Criterion) {
    let path = generic_path();
    let (lo, hi) = path.domain();
    c.bench_function("eval_point_and_frame", |b| {
        b.iter(|| path.eval(black_box(lo + 0.37 * (hi - lo))).unwrap())
    });
    c.bench_function("sample_1000", |b| b.iter(|| path.sample(black_box(1000))));
}

criterion_group!(benches, local_solve, spline_build, evaluation);
criterion_main!(benches);
