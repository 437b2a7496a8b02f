//! Compare the rayon data-parallel execution against sequential runs of
//! the same kernels. The sequential side runs either the dedicated
//! fallback implementation (Warnock) or the identical code pinned to a
//! one-thread pool; results are bit-identical either way because every
//! reduction is blocked and order-fixed.

use criterion::{criterion_group, criterion_main, Criterion};
use netscope_core::net::generate_points;
use netscope_core::norms::{l2_haar, l2_warnock_sq, l2_warnock_sq_seq};
use netscope_core::quality::{enumerate_dual, Budget};
use netscope_core::verify::{self, interlaced_faure};
use netscope_core::walsh::walsh_direct_grid_sweep;
use netscope_core::net::construct_hammersley;

fn single_thread_pool() -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new().num_threads(1).build().expect("pool")
}

fn bench_warnock(c: &mut Criterion) {
    let pts = generate_points(&construct_hammersley(2, 9).unwrap());
    let mut group = c.benchmark_group("warnock_n9");
    group.sample_size(20);
    group.bench_function("parallel", |b| b.iter(|| l2_warnock_sq(&pts)));
    group.bench_function("sequential", |b| b.iter(|| l2_warnock_sq_seq(&pts)));
    // the two routes agree to the bit
    assert_eq!(l2_warnock_sq(&pts).to_bits(), l2_warnock_sq_seq(&pts).to_bits());
    group.finish();
}

fn bench_haar_parseval(c: &mut Criterion) {
    let pts = generate_points(&construct_hammersley(2, 7).unwrap());
    let pool = single_thread_pool();
    let mut group = c.benchmark_group("l2_haar_n7_jmax13");
    group.sample_size(10);
    group.bench_function("parallel", |b| b.iter(|| l2_haar(&pts, 13)));
    group.bench_function("one_thread", |b| b.iter(|| pool.install(|| l2_haar(&pts, 13))));
    let par = l2_haar(&pts, 13).squared;
    let seq = pool.install(|| l2_haar(&pts, 13)).squared;
    assert_eq!(par.to_bits(), seq.to_bits());
    group.finish();
}

fn bench_grid_sweep(c: &mut Criterion) {
    let g = interlaced_faure(3, 3, 2).unwrap();
    let pts = generate_points(&g);
    let duals = enumerate_dual(&g, g.s(), &Budget::default()).unwrap();
    let pool = single_thread_pool();
    let mut group = c.benchmark_group("walsh_grid_sweep_531k_cells");
    group.sample_size(10);
    group.bench_function("parallel", |b| b.iter(|| walsh_direct_grid_sweep(&pts, &duals)));
    group.bench_function("one_thread", |b| {
        b.iter(|| pool.install(|| walsh_direct_grid_sweep(&pts, &duals)))
    });
    group.finish();
}

fn bench_character_sweep(c: &mut Criterion) {
    let g = netscope_core::net::construct_faure(3, 3, 3).unwrap();
    let budget = Budget::default();
    let pool = single_thread_pool();
    let mut group = c.benchmark_group("character_sweep_19683_candidates");
    group.sample_size(10);
    group.bench_function("parallel", |b| {
        b.iter(|| verify::verify_walsh_character(&g, g.s(), &budget))
    });
    group.bench_function("one_thread", |b| {
        b.iter(|| pool.install(|| verify::verify_walsh_character(&g, g.s(), &budget)))
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_warnock,
    bench_haar_parseval,
    bench_grid_sweep,
    bench_character_sweep
);
criterion_main!(benches);
