use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use rcia_core::channel::NoiseMode;
use rcia_core::engine::run;
use rcia_core::numerics::{gaussian_matrix, rank, row_space_leverage, SeededRng, DEFAULT_REL_TOL};
use rcia_core::regions::{region_ic_rx_coop_equal_n, region_ic_rx_coop_unequal};
use rcia_core::schemes::{build_rcia_equal_n, build_rcia_unequal};

fn bench_rank(c: &mut Criterion) {
    let mut group = c.benchmark_group("qr_rank");
    for n in [4usize, 16, 48] {
        let m = gaussian_matrix(&mut SeededRng::new(1, 0), n, n).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &m, |b, m| b.iter(|| rank(black_box(m), DEFAULT_REL_TOL)));
    }
    group.finish();
}

fn bench_leverage(c: &mut Criterion) {
    let m = gaussian_matrix(&mut SeededRng::new(2, 0), 24, 32).unwrap();
    c.bench_function("row_space_leverage_24x32", |b| b.iter(|| row_space_leverage(black_box(&m), DEFAULT_REL_TOL)));
}

fn bench_vertices(c: &mut Criterion) {
    let equal = region_ic_rx_coop_equal_n(6, 4, 2).unwrap();
    let unequal = region_ic_rx_coop_unequal(4, 1, 3, 2).unwrap();
    c.bench_function("vertices_equal_n", |b| b.iter(|| black_box(&equal).vertices().unwrap()));
    c.bench_function("vertices_unequal", |b| b.iter(|| black_box(&unequal).vertices().unwrap()));
}

fn bench_engine(c: &mut Criterion) {
    let mut group = c.benchmark_group("engine_run");
    let equal = build_rcia_equal_n(2, 2, 1).unwrap();
    group.bench_function("equal_n_2_2_1", |b| b.iter(|| run(black_box(&equal), 1, NoiseMode::NoiseFree).unwrap()));
    for blocks in [2usize, 8] {
        let s = build_rcia_unequal(4, 1, 3, 2, blocks).unwrap();
        group.bench_with_input(BenchmarkId::new("unequal_4_1_3_2", blocks), &s, |b, s| {
            b.iter(|| run(black_box(s), 1, NoiseMode::NoiseFree).unwrap())
        });
    }
    group.finish();
}

criterion_group!(numerics, bench_rank, bench_leverage);
criterion_group!(regions, bench_vertices);
criterion_group!(engine, bench_engine);
criterion_main!(numerics, regions, engine);
