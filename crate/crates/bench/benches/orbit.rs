use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use explab::freegroup::enumerate_words;
use explab::series::{pressure_root, LogSum, Layer, DEFAULT_ROOT_TOL};
use explab_bench::reference_group;
use std::hint::black_box;

fn orbit_sum(c: &mut Criterion) {
    let g = reference_group();
    let cores = std::thread::available_parallelism().map_or(1, |n| n.get());
    let mut workers = vec![1, 4];
    if !workers.contains(&cores) {
        workers.push(cores);
    }
    let mut group = c.benchmark_group("orbit_fold_L11");
    group.sample_size(10);
    for w in workers {
        group.bench_with_input(BenchmarkId::from_parameter(w), &w, |b, &w| {
            b.iter(|| {
                g.orbit_fold(
                    11,
                    w,
                    || LogSum::EMPTY,
                    |acc, _, m| acc.add(-0.5 * m.displacement()),
                    LogSum::merge,
                )
                .value()
            })
        });
    }
    group.finish();
}

fn pressure(c: &mut Criterion) {
    let g = reference_group();
    let layer = Layer::new(&g, 10, 1);
    c.bench_function("pressure_root_L10", |b| b.iter(|| pressure_root(black_box(&layer), DEFAULT_ROOT_TOL).unwrap().value));
}

fn words(c: &mut Criterion) {
    c.bench_function("enumerate_words_L9", |b| b.iter(|| enumerate_words(2, black_box(9)).count()));
}

criterion_group!(benches, orbit_sum, pressure, words);
criterion_main!(benches);
