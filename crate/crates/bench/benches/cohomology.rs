use billiards_core::{build_plane_conf_algebra, build_sphere_conf_algebra, index_and_bound};
use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

fn algebras(c: &mut Criterion) {
    for (d, p) in [(3, 5), (4, 7)] {
        c.bench_function(&format!("plane algebra d={d} p={p}"), |b| {
            b.iter(|| {
                build_plane_conf_algebra(black_box(d), p)
                    .unwrap()
                    .top_degree()
            })
        });
    }
    c.bench_function("sphere algebra d=6 p=13", |b| {
        b.iter(|| {
            build_sphere_conf_algebra(black_box(6), 13)
                .unwrap()
                .top_degree()
        })
    });
    c.bench_function("index_and_bound d=4 p=5", |b| {
        b.iter(|| index_and_bound(black_box(4), 5))
    });
}

criterion_group!(benches, algebras);
criterion_main!(benches);
