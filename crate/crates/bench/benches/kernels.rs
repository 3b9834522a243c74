use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use trolab_core::funcalc::tro_closure_of_range;
use trolab_core::maps::estimate_amplified_norm;
use trolab_core::preservers::{
    classify_cop, factorize, generate, is_triple_homomorphism, GeneratorKind, GeneratorParams,
};
use trolab_core::rng::{gaussian_matrix, rng_from_seed};
use trolab_core::{Algebra, LinearMap};

fn sample(kind: GeneratorKind, blocks: Vec<usize>) -> LinearMap {
    generate(
        kind,
        &GeneratorParams::new(Algebra::new(blocks).unwrap()),
        3,
    )
    .unwrap()
    .map
}

fn svd(c: &mut Criterion) {
    let mut g = c.benchmark_group("svd");
    for n in [8, 32, 64] {
        let m = gaussian_matrix(n, n, &mut rng_from_seed(n as u64));
        g.bench_function(format!("{n}x{n}"), |b| {
            b.iter(|| black_box(&m).svd().unwrap())
        });
    }
    g.finish();
}

fn norms(c: &mut Criterion) {
    let t = LinearMap::make_transpose(3).unwrap();
    let mut g = c.benchmark_group("amplified_norm");
    g.sample_size(20);
    for n in [1, 2, 3] {
        g.bench_function(format!("transpose3_n{n}"), |b| {
            b.iter(|| estimate_amplified_norm(black_box(&t), n, 4, 0).unwrap())
        });
    }
    g.finish();
}

fn checks(c: &mut Criterion) {
    let mixed = sample(GeneratorKind::WeightedTripleHomMixed, vec![2, 1]);
    let support = factorize(&mixed).unwrap().support;
    c.bench_function("triple_hom_check", |b| {
        b.iter(|| is_triple_homomorphism(black_box(&support)))
    });
    c.bench_function("factorize", |b| {
        b.iter(|| factorize(black_box(&mixed)).unwrap())
    });
    let mut g = c.benchmark_group("classify");
    g.sample_size(10);
    g.bench_function("cop_m2", |b| {
        b.iter(|| classify_cop(black_box(&mixed), 20, 0).unwrap())
    });
    g.finish();
    c.bench_function("tro_closure", |b| {
        b.iter(|| tro_closure_of_range(black_box(&mixed), 10).unwrap())
    });
}

criterion_group!(benches, svd, norms, checks);
criterion_main!(benches);
