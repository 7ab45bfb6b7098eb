use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use qsym_core::diagram::{enumerate_diagrams, image_algebra_dimension};
use qsym_core::fusion::{dimension_sequence, fundamental_power};
use qsym_core::homs::{enumerate_xk, gram_report};
use qsym_core::tensor::{verify_frobenius, verify_jones_relations};
use qsym_core::{AlgebraShape, StructureMaps};

fn shape(spec: &str) -> AlgebraShape {
    AlgebraShape::parse(spec).unwrap()
}

fn structure_maps(c: &mut Criterion) {
    let s = shape("3,2,1");
    c.bench_function("structure_maps [3,2,1]", |b| {
        b.iter(|| StructureMaps::canonical(black_box(&s)))
    });
    let s = shape("2,2");
    c.bench_function("frobenius [2,2]", |b| b.iter(|| verify_frobenius(black_box(&s), 1e-10)));
    c.bench_function("jones [2,2]", |b| b.iter(|| verify_jones_relations(black_box(&s), 1e-10)));
}

fn gram(c: &mut Criterion) {
    let mut g = c.benchmark_group("gram");
    g.sample_size(10);
    for spec in ["2", "2,1", "2,1,1"] {
        let s = shape(spec);
        g.bench_function(format!("X_5 [{spec}]"), |b| b.iter(|| gram_report(black_box(&s), 5, 1e-8)));
    }
    let s = shape("2,1");
    g.bench_function("TL image k=2 [2,1]", |b| {
        b.iter(|| image_algebra_dimension(black_box(&s), 2, 1e-8))
    });
    g.finish();
}

fn combinatorics(c: &mut Criterion) {
    c.bench_function("diagrams m=8", |b| b.iter(|| enumerate_diagrams(black_box(8))));
    c.bench_function("X_k k=8", |b| b.iter(|| enumerate_xk(black_box(8))));
}

fn fusion(c: &mut Criterion) {
    c.bench_function("fundamental power k=30", |b| b.iter(|| fundamental_power(black_box(30), 30)));
    c.bench_function("dimensions n=12 level=30", |b| b.iter(|| dimension_sequence(black_box(12), 30)));
}

criterion_group!(benches, structure_maps, gram, combinatorics, fusion);
criterion_main!(benches);
