use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use dicke_cooling::{
    build_dissipators, build_hamiltonian, steady_state, vectorize, PhysicalParams,
};

fn params(fock_dim: usize) -> PhysicalParams {
    PhysicalParams {
        fock_dim,
        ..Default::default()
    }
    .with_subradiant_width(0.05)
    .on_red_sideband()
}

fn bench_vectorize(c: &mut Criterion) {
    let mut group = c.benchmark_group("vectorize");
    for fock_dim in [10, 20] {
        let p = params(fock_dim);
        let space = p.space().unwrap();
        let h = build_hamiltonian(&p, &space).unwrap();
        let diss = build_dissipators(&p, &space).unwrap();
        group.bench_function(format!("fock_{fock_dim}"), |b| {
            b.iter(|| vectorize(black_box(&h), black_box(&diss)).unwrap())
        });
    }
    group.finish();
}

fn bench_steady_solve(c: &mut Criterion) {
    let mut group = c.benchmark_group("steady_state");
    group.sample_size(10);
    for fock_dim in [10, 20] {
        let p = params(fock_dim);
        let space = p.space().unwrap();
        let h = build_hamiltonian(&p, &space).unwrap();
        let diss = build_dissipators(&p, &space).unwrap();
        let l = vectorize(&h, &diss).unwrap();
        group.bench_function(format!("fock_{fock_dim}"), |b| {
            b.iter(|| steady_state(black_box(&l)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_vectorize, bench_steady_solve);
criterion_main!(benches);
