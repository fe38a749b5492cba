use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fracpicard::{FracIntegralOperator, Grid, SampledFunction};

fn build_and_apply(c: &mut Criterion) {
    let mut group = c.benchmark_group("integral");
    for n in [256usize, 1024, 4096] {
        for (label, grid) in [
            ("uniform", Grid::uniform(1.0, n).unwrap()),
            ("graded", Grid::graded(1.0, n, 2.0).unwrap()),
        ] {
            let grid = Arc::new(grid);
            group.bench_with_input(
                BenchmarkId::new(format!("build/{label}"), n),
                &grid,
                |b, g| b.iter(|| FracIntegralOperator::new(0.5, Arc::clone(g)).unwrap()),
            );
            let op = FracIntegralOperator::new(0.5, Arc::clone(&grid)).unwrap();
            let f = SampledFunction::from_fn(Arc::clone(&grid), f64::cos);
            group.bench_with_input(BenchmarkId::new(format!("apply/{label}"), n), &f, |b, f| {
                b.iter(|| op.apply(black_box(f)).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, build_and_apply);
criterion_main!(benches);
