use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use cnfgraph::experiment::fixed_clause_params;
use cnfgraph::{
    count_k22_class_pairs, count_k22_wedge, count_k22_zeta, degrees, sample_bernoulli_graph,
    sample_cnf, stream_rng, subset_zeta, Caps, ClauseSystem, SampleOptions, Side,
};

fn instance(size: usize, p: f64, n: usize) -> ClauseSystem {
    sample_cnf(&fixed_clause_params(size, p, n), &SampleOptions::default(), &mut stream_rng(1)).unwrap()
}

fn k22(c: &mut Criterion) {
    let caps = Caps::default();
    let mut group = c.benchmark_group("count_k22");
    for n in [8, 12, 16] {
        let cs = instance(1000, 0.3, n);
        group.bench_with_input(BenchmarkId::new("zeta", n), &cs, |b, cs| {
            b.iter(|| count_k22_zeta(black_box(cs), &caps).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("class_pairs", n), &cs, |b, cs| {
            b.iter(|| count_k22_class_pairs(black_box(cs)).unwrap())
        });
    }
    let g = sample_bernoulli_graph(1000, 1000, 0.1, &mut stream_rng(2)).unwrap();
    group.bench_function("wedge_bernoulli_1000", |b| b.iter(|| count_k22_wedge(black_box(&g)).unwrap()));
    group.finish();
}

fn zeta(c: &mut Criterion) {
    let caps = Caps::default();
    let cs = instance(4096, 0.3, 20);
    let hist = cs.mask_histogram(Side::Right);
    c.bench_function("subset_zeta_n20", |b| {
        b.iter(|| subset_zeta(black_box(&hist), 20, &caps).unwrap())
    });
    c.bench_function("degrees_4096_n17", |b| {
        let cs = instance(4096, 0.3, 17);
        b.iter(|| degrees(black_box(&cs), &caps))
    });
}

fn sampling(c: &mut Criterion) {
    let params = fixed_clause_params(4096, 0.3, 17);
    c.bench_function("sample_cnf_4096_n17", |b| {
        b.iter(|| sample_cnf(black_box(&params), &SampleOptions::default(), &mut stream_rng(3)).unwrap())
    });
}

criterion_group!(benches, k22, zeta, sampling);
criterion_main!(benches);
