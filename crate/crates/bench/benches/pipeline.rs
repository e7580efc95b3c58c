use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use modcomp_bench::{blowup_plane, caterpillar, lines};
use modcomp_core::moduli::{irreducible_components, vertex_classes, RunOptions};
use modcomp_core::toricfan::max_parts_bound;
use modcomp_core::{enumerate_trees, h0_tree, Mode};

fn enumeration(c: &mut Criterion) {
    let target = blowup_plane();
    let mut group = c.benchmark_group("enumerate");
    group.sample_size(10);
    for d in [2, 3] {
        let beta = lines(d);
        let classes = vertex_classes(&target, &beta, Mode::Maps).unwrap();
        let max_parts = max_parts_bound(&target.basis, &beta).unwrap();
        group.bench_function(format!("{d}l"), |b| {
            b.iter(|| enumerate_trees(black_box(&beta), 0, &classes, Mode::Maps, max_parts))
        });
    }
    group.finish();
}

fn components(c: &mut Criterion) {
    let target = blowup_plane();
    let mut group = c.benchmark_group("components");
    group.sample_size(10);
    for (name, d, n, mode) in
        [("2l", 2, 0, Mode::Maps), ("2l_n2_quasi", 2, 2, Mode::Quasimaps), ("3l", 3, 0, Mode::Maps)]
    {
        let beta = lines(d);
        group.bench_function(name, |b| {
            b.iter(|| irreducible_components(&target, black_box(&beta), n, mode, &RunOptions::default()).unwrap())
        });
    }
    group.finish();
}

fn cohomology(c: &mut Criterion) {
    let mut group = c.benchmark_group("h0_tree");
    for n in [4, 8, 16] {
        let t = caterpillar(n);
        group.bench_function(format!("caterpillar_{n}"), |b| b.iter(|| h0_tree(black_box(&t))));
    }
    group.finish();
}

criterion_group!(benches, enumeration, components, cohomology);
criterion_main!(benches);
