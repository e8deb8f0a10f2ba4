//! Sequential against data-parallel execution of the hot loops. Both modes
//! produce identical results; only wall time differs.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use nilgen_core::fraisse::{
    build_from_catalog, build_generic, check_extension_property_with, enumerate_catalog,
    enumerate_catalog_with, BuildOptions, CheckBudget, DEFAULT_TABLE_BUDGET,
};
use nilgen_core::model_theory::{
    all_paths, indep0_raw, kp_random_suite_with, tp2_build_and_check_with,
};
use nilgen_core::Exec;

const MODES: [(&str, Exec); 2] = [
    ("sequential", Exec::Sequential),
    ("parallel", Exec::Parallel),
];

fn bench(c: &mut Criterion) {
    let stage = build_generic(3, 1, 2, 2, 0).unwrap().sys;
    let catalog = enumerate_catalog(3, 1, 2).unwrap();
    let paths = all_paths(4, 4).unwrap();

    let mut group = c.benchmark_group("exec");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::new("kp_suite_1000", name), |b| {
            b.iter(|| kp_random_suite_with(exec, black_box(&stage), 1000, 1, &indep0_raw))
        });
        group.bench_function(BenchmarkId::new("extension_check_t2", name), |b| {
            b.iter(|| {
                check_extension_property_with(
                    exec,
                    black_box(&stage),
                    2,
                    &catalog,
                    CheckBudget::default(),
                )
            })
        });
        group.bench_function(BenchmarkId::new("tp2_4x4", name), |b| {
            b.iter(|| tp2_build_and_check_with(exec, 4, 4, 3, black_box(&paths)))
        });
        group.bench_function(BenchmarkId::new("catalog_n2_d2", name), |b| {
            b.iter(|| enumerate_catalog_with(exec, 3, 2, 2, DEFAULT_TABLE_BUDGET))
        });
        group.bench_function(BenchmarkId::new("build_generic", name), |b| {
            let opts = BuildOptions {
                exec,
                ..BuildOptions::default()
            };
            b.iter(|| build_from_catalog(catalog.clone(), 2, 2, 0, opts))
        });
    }
    group.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
