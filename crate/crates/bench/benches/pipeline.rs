use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use szego_bench::{measures, spiral_poles};
use szego_core::limit::polar_grid;
use szego_core::{
    build_pipeline, check_sum_rule, construct_product, spectral_factorize, stieltjes, FactorConfig,
    NormType, Tolerances,
};

fn recurrence(c: &mut Criterion) {
    let mut group = c.benchmark_group("stieltjes");
    for (name, mu) in measures() {
        if name == "free" || name == "perturbed+mass" {
            group.bench_with_input(BenchmarkId::new(name, 100), &mu, |b, mu| {
                b.iter(|| stieltjes(black_box(mu), 100).unwrap())
            });
        }
    }
    group.finish();
}

fn factorization(c: &mut Criterion) {
    let mut group = c.benchmark_group("spectral_factorize");
    for (name, mu) in measures() {
        if name == "twisted" || name == "free(+)arcsine" {
            let w = mu.szego_weight().unwrap();
            let tol = Tolerances::default();
            group.bench_function(name, |b| {
                b.iter(|| {
                    spectral_factorize(black_box(&w), &FactorConfig::default(), &tol).unwrap()
                })
            });
        }
    }
    group.finish();
}

fn blaschke(c: &mut Criterion) {
    let mut group = c.benchmark_group("construct_product");
    for count in [2, 10] {
        let poles = spiral_poles(3, count);
        group.bench_with_input(BenchmarkId::from_parameter(count), &poles, |b, p| {
            b.iter(|| construct_product(3, black_box(p)).unwrap())
        });
    }
    group.finish();
}

fn end_to_end(c: &mut Criterion) {
    let mut group = c.benchmark_group("end_to_end");
    group.sample_size(10);
    let (_, mu) = measures()
        .into_iter()
        .find(|(n, _)| *n == "perturbed+mass")
        .unwrap();
    group.bench_function("pipeline", |b| {
        b.iter(|| build_pipeline(black_box(&mu), &FactorConfig::default()).unwrap())
    });

    let p = build_pipeline(&mu, &FactorConfig::default()).unwrap();
    let seq = stieltjes(&mu, 100).unwrap();
    let j2 = seq.jacobi().to_type(NormType::Type2).0;
    let grid = polar_grid(0.8);
    group.bench_function("scaled_eval_grid_n100", |b| {
        b.iter(|| {
            grid.iter()
                .map(|&z| j2.eval_scaled(100, z).unwrap()[(0, 0)].norm())
                .sum::<f64>()
        })
    });
    let n_list: Vec<usize> = (1..=100).collect();
    group.bench_function("sum_rule_n100", |b| {
        b.iter(|| {
            check_sum_rule(
                &mu,
                seq.jacobi(),
                &p.states,
                Some(&p.limit.g),
                black_box(&n_list),
            )
            .unwrap()
        })
    });
    group.finish();
}

criterion_group!(benches, recurrence, factorization, blaschke, end_to_end);
criterion_main!(benches);
