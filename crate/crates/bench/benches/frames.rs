use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use framebound::frames::{fp_exact_from_floats, fp_from_matrix, fp_montecarlo, fp_sphere_2d};
use framebound::Matrix;

fn exact_routes(c: &mut Criterion) {
    let mut group = c.benchmark_group("fp_exact");
    let s2 = [2.5, 1.25, 0.75, 0.5];
    for p in [2u32, 4, 6, 8] {
        group.bench_with_input(BenchmarkId::from_parameter(p), &p, |b, &p| {
            b.iter(|| fp_exact_from_floats(&s2, p).unwrap())
        });
    }
    group.finish();
}

fn from_matrix(c: &mut Criterion) {
    let t = Matrix::from_rows(vec![
        vec![1.0, 0.2, -0.3],
        vec![0.4, 1.5, 0.1],
        vec![0.0, -0.6, 0.8],
    ])
    .unwrap();
    c.bench_function("fp_from_matrix d=3 p=4", |b| b.iter(|| fp_from_matrix(&t, 4).unwrap()));
}

fn sampling(c: &mut Criterion) {
    let t = Matrix::diag(&[2.0, 1.0]).unwrap();
    c.bench_function("fp_sphere_2d p=1/2", |b| b.iter(|| fp_sphere_2d([4.0, 1.0], 0.5).unwrap()));
    let mut group = c.benchmark_group("fp_montecarlo");
    group.sample_size(10);
    group.bench_function("100k samples", |b| b.iter(|| fp_montecarlo(&t, 2.0, 100_000, 0).unwrap()));
    group.finish();
}

criterion_group!(benches, exact_routes, from_matrix, sampling);
criterion_main!(benches);
