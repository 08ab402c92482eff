//! Throughput of the linear-time checkers and the exact solver on
//! random trees. The checkers should scale linearly from 1e5 to 1e6.

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use treereal::{
    check_depths, check_height_depth_synced, check_heights, solve_sizes, RootedTree, SizeInstance,
    SolveOptions, Subclass,
};

fn bench_checkers(c: &mut Criterion) {
    let mut group = c.benchmark_group("checkers");
    for n in [100_000usize, 1_000_000] {
        let tree = RootedTree::random(n, 2, 42);
        let depths = tree.depths();
        let heights = tree.heights();
        let pairs: Vec<(u64, u64)> = heights.iter().copied().zip(depths.iter().copied()).collect();
        group.bench_with_input(BenchmarkId::new("check_depths", n), &depths, |b, d| {
            b.iter(|| check_depths(black_box(d), 2, Subclass::Any))
        });
        group.bench_with_input(BenchmarkId::new("check_heights", n), &heights, |b, h| {
            b.iter(|| check_heights(black_box(h), 2, Subclass::Any))
        });
        group.bench_with_input(BenchmarkId::new("check_hd_synced", n), &pairs, |b, p| {
            b.iter(|| check_height_depth_synced(black_box(p), 2))
        });
    }
    group.finish();
}

fn bench_solver(c: &mut Criterion) {
    let mut group = c.benchmark_group("solver");
    group.sample_size(20);
    for n in [1_000usize, 10_000] {
        let tree = RootedTree::random(n, 2, 7);
        let instance = SizeInstance::plain(tree.sizes(), 2);
        group.bench_with_input(BenchmarkId::new("solve_sizes", n), &instance, |b, inst| {
            b.iter(|| solve_sizes(black_box(inst), &SolveOptions::default()))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_checkers, bench_solver);
criterion_main!(benches);
